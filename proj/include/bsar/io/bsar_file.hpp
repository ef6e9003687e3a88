// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "bsar/core/matrix.hpp"
#include "bsar/error.hpp"

namespace bsar::io {

// BSAR layout, little-endian:
//   0  magic "BSAR"      4  u16 version (1)    6  u16 flags (bit 0: focused)
//   8  u32 rows          12 u32 cols           16 16 reserved zero bytes
//   32 rows*cols pairs of float32 (I, Q), row-major
inline constexpr std::size_t header_size = 32;
inline constexpr std::uint16_t format_version = 1;
inline constexpr std::uint16_t flag_focused = 0x1;

struct BsarFile {
    ComplexMatrix matrix;
    std::uint16_t flags = 0;
};

namespace detail {

inline void put_u16(std::vector<unsigned char>& b, std::size_t at, std::uint16_t v)
{
    b[at] = static_cast<unsigned char>(v & 0xff);
    b[at + 1] = static_cast<unsigned char>(v >> 8);
}

inline void put_u32(std::vector<unsigned char>& b, std::size_t at, std::uint32_t v)
{
    for (std::size_t i = 0; i < 4; ++i) {
        b[at + i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    }
}

inline std::uint16_t get_u16(const std::vector<unsigned char>& b, std::size_t at)
{
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

inline std::uint32_t get_u32(const std::vector<unsigned char>& b, std::size_t at)
{
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
    }
    return v;
}

}  // namespace detail

inline std::vector<unsigned char> encode_bsar(const ComplexMatrix& m, std::uint16_t flags)
{
    if (m.rows() > UINT32_MAX || m.cols() > UINT32_MAX) {
        throw ParameterError("matrix too large for the BSAR format");
    }
    std::vector<unsigned char> b(header_size + m.size() * 8, 0);
    std::memcpy(b.data(), "BSAR", 4);
    detail::put_u16(b, 4, format_version);
    detail::put_u16(b, 6, flags);
    detail::put_u32(b, 8, static_cast<std::uint32_t>(m.rows()));
    detail::put_u32(b, 12, static_cast<std::uint32_t>(m.cols()));
    std::size_t at = header_size;
    for (const auto& z : m.data()) {
        detail::put_u32(b, at, std::bit_cast<std::uint32_t>(static_cast<float>(z.real())));
        detail::put_u32(b, at + 4, std::bit_cast<std::uint32_t>(static_cast<float>(z.imag())));
        at += 8;
    }
    return b;
}

inline BsarFile decode_bsar(const std::vector<unsigned char>& b)
{
    if (b.size() < 4 || std::memcmp(b.data(), "BSAR", 4) != 0) {
        throw FormatError("bad magic, expected \"BSAR\"", 0);
    }
    if (b.size() < header_size) {
        throw FormatError("truncated header", b.size());
    }
    const auto version = detail::get_u16(b, 4);
    if (version != format_version) {
        throw FormatError("unsupported version " + std::to_string(version), 4);
    }
    const std::uint32_t rows = detail::get_u32(b, 8);
    const std::uint32_t cols = detail::get_u32(b, 12);
    if (rows == 0 || cols == 0) {
        throw FormatError("zero matrix dimension", rows == 0 ? 8 : 12);
    }
    for (std::size_t i = 16; i < header_size; ++i) {
        if (b[i] != 0) {
            throw FormatError("reserved header byte is not zero", i);
        }
    }
    const std::size_t expected = header_size + static_cast<std::size_t>(rows) * cols * 8;
    if (b.size() < expected) {
        throw FormatError("truncated payload: expected " + std::to_string(expected) + " bytes", b.size());
    }
    if (b.size() > expected) {
        throw FormatError("trailing bytes after payload", expected);
    }
    BsarFile f{ComplexMatrix(rows, cols), detail::get_u16(b, 6)};
    std::size_t at = header_size;
    for (auto& z : f.matrix.data()) {
        const float re = std::bit_cast<float>(detail::get_u32(b, at));
        const float im = std::bit_cast<float>(detail::get_u32(b, at + 4));
        z = cdouble(re, im);
        at += 8;
    }
    return f;
}

inline std::vector<unsigned char> read_bytes(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParameterError("cannot open " + path);
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::string& path, const std::vector<unsigned char>& b)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ParameterError("cannot write " + path);
    }
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
    if (!out) {
        throw ParameterError("write failed for " + path);
    }
}

inline BsarFile read_bsar(const std::string& path) { return decode_bsar(read_bytes(path)); }

inline ComplexMatrix read_matrix(const std::string& path) { return read_bsar(path).matrix; }

inline void write_matrix(const ComplexMatrix& m, const std::string& path, std::uint16_t flags = 0)
{
    write_bytes(path, encode_bsar(m, flags));
}

}  // namespace bsar::io
