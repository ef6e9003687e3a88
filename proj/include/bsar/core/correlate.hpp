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
#include <span>
#include <string>

#include "bsar/core/fft.hpp"
#include "bsar/core/matrix.hpp"
#include "bsar/error.hpp"

namespace bsar {

/// Correlates every row of `raw` with `ref` (matched filter, conjugated
/// reference) by zero-padded frequency-domain multiplication.
///
/// Group-delay rule: output sample n holds the correlation at lag
/// n - origin, where lag l means "reference sample 0 aligned with row sample
/// l". With origin = 0 a row equal to the reference peaks at column 0; with
/// origin = the reference's zero-frequency sample, an echo peaks at the
/// column of its zero-frequency sample. Output has the input's N columns.
inline ComplexMatrix range_compress(const ComplexMatrix& raw, std::span<const cdouble> ref, double origin = 0.0)
{
    const std::size_t n = raw.cols();
    if (ref.empty() || ref.size() > n) {
        throw ParameterError("range reference length " + std::to_string(ref.size()) + " must lie in [1, " +
                             std::to_string(n) + "]");
    }
    const std::size_t padded = fast_length(n + ref.size() - 1);
    ComplexVector filter(padded, cdouble{});
    std::copy(ref.begin(), ref.end(), filter.begin());
    dft_inplace(filter);
    for (auto& z : filter) {
        z = std::conj(z);
    }
    if (origin != 0.0) {
        apply_delay(filter, origin);
    }

    ComplexMatrix out(raw.rows(), n);
    ComplexVector line(padded);
    for (std::size_t r = 0; r < raw.rows(); ++r) {
        const auto in = raw.row(r);
        std::copy(in.begin(), in.end(), line.begin());
        std::fill(line.begin() + static_cast<std::ptrdiff_t>(n), line.end(), cdouble{});
        dft_inplace(line);
        for (std::size_t k = 0; k < padded; ++k) {
            line[k] *= filter[k];
        }
        dft_inplace(line, true);
        std::copy(line.begin(), line.begin() + static_cast<std::ptrdiff_t>(n), out.row(r).begin());
    }
    return out;
}

}  // namespace bsar
