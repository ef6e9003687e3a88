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
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bsar/error.hpp"

namespace bsar {

using cdouble = std::complex<double>;
using ComplexVector = std::vector<cdouble>;

/// Half-open index interval [start, stop).
struct Interval {
    std::size_t start = 0;
    std::size_t stop = 0;

    std::size_t length() const noexcept { return stop > start ? stop - start : 0; }
    bool empty() const noexcept { return stop <= start; }
    bool contains(std::size_t i) const noexcept { return i >= start && i < stop; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Dense row-major complex matrix. Rows are azimuth pulses, columns are
/// range samples when the matrix holds radar data.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(checked_size(rows, cols))
    {
    }

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cdouble> data)
        : rows_(rows), cols_(cols), data_(std::move(data))
    {
        if (data_.size() != checked_size(rows, cols)) {
            throw ParameterError("matrix data length " + std::to_string(data_.size()) +
                                 " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
        }
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    cdouble& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const cdouble& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<cdouble> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const cdouble> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    ComplexVector column(std::size_t c) const
    {
        ComplexVector out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            out[r] = data_[r * cols_ + c];
        }
        return out;
    }

    void set_column(std::size_t c, std::span<const cdouble> values) noexcept
    {
        for (std::size_t r = 0; r < rows_; ++r) {
            data_[r * cols_ + c] = values[r];
        }
    }

    std::span<cdouble> data() noexcept { return data_; }
    std::span<const cdouble> data() const noexcept { return data_; }

    ComplexMatrix& operator+=(const ComplexMatrix& other)
    {
        require_same_shape(other);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            data_[i] += other.data_[i];
        }
        return *this;
    }

    ComplexMatrix& operator*=(cdouble scale) noexcept
    {
        for (auto& z : data_) {
            z *= scale;
        }
        return *this;
    }

    double frobenius_norm_squared() const noexcept
    {
        double sum = 0.0;
        for (const auto& z : data_) {
            sum += std::norm(z);
        }
        return sum;
    }

    bool same_shape(const ComplexMatrix& other) const noexcept
    {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    static std::size_t checked_size(std::size_t rows, std::size_t cols)
    {
        if (rows == 0 || cols == 0) {
            throw ParameterError("matrix dimensions must be at least 1x1");
        }
        return rows * cols;
    }

    void require_same_shape(const ComplexMatrix& other) const
    {
        if (!same_shape(other)) {
            throw ParameterError("matrix shape mismatch");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cdouble> data_;
};

/// Raw echo samples; same layout as any complex matrix. The blind pipeline
/// deliberately carries no acquisition metadata alongside it.
using RawDataMatrix = ComplexMatrix;

inline std::vector<double> magnitude(std::span<const cdouble> x)
{
    std::vector<double> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [](const cdouble& z) { return std::abs(z); });
    return out;
}

inline double energy(std::span<const cdouble> x) noexcept
{
    double sum = 0.0;
    for (const auto& z : x) {
        sum += std::norm(z);
    }
    return sum;
}

}  // namespace bsar
