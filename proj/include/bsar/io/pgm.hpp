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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bsar/core/matrix.hpp"
#include "bsar/error.hpp"
#include "bsar/io/bsar_file.hpp"

namespace bsar::io {

struct Rendering {
    std::vector<unsigned char> bytes;  // complete P5 file
    bool all_zero = false;
};

/// 8-bit binary PGM of 20 log10(|z| / max|z|), mapped linearly from
/// [db_floor, 0] to [0, 255] and clamped.
inline Rendering render_pgm(const ComplexMatrix& m, double db_floor)
{
    if (!(db_floor < 0.0) || !std::isfinite(db_floor)) {
        throw ParameterError("render floor must be a finite negative dB value");
    }
    const std::string header = "P5\n" + std::to_string(m.cols()) + " " + std::to_string(m.rows()) + "\n255\n";
    Rendering r;
    r.bytes.assign(header.begin(), header.end());
    double peak = 0.0;
    for (const auto& z : m.data()) {
        peak = std::max(peak, std::abs(z));
    }
    r.all_zero = !(peak > 0.0);
    r.bytes.reserve(header.size() + m.size());
    for (const auto& z : m.data()) {
        unsigned char px = 0;
        const double a = std::abs(z);
        if (!r.all_zero && a > 0.0) {
            const double db = 20.0 * std::log10(a / peak);
            const double level = std::clamp((db - db_floor) / -db_floor * 255.0, 0.0, 255.0);
            px = static_cast<unsigned char>(std::lround(level));
        }
        r.bytes.push_back(px);
    }
    return r;
}

/// Writes the PGM; returns false (image all black) when the input is all zero.
inline bool render_magnitude(const ComplexMatrix& m, double db_floor, const std::string& path)
{
    const auto r = render_pgm(m, db_floor);
    write_bytes(path, r.bytes);
    return !r.all_zero;
}

}  // namespace bsar::io
