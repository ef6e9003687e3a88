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

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "bsar/error.hpp"

namespace bsar {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Wraps a value in cycles into (-0.5, 0.5].
inline double wrap_cycles(double cycles) noexcept
{
    double w = cycles - std::floor(cycles);  // [0, 1)
    return w > 0.5 ? w - 1.0 : w;
}

/// Wraps an angle into (-pi, pi].
inline double wrap_radians(double angle) noexcept
{
    return two_pi * wrap_cycles(angle / two_pi);
}

/// Restores a continuous phase from samples known modulo 2*pi.
/// Successive output differences lie in (-pi, pi] and the first sample is
/// passed through unchanged.
inline std::vector<double> unwrap_phase(std::span<const double> wrapped)
{
    std::vector<double> out(wrapped.begin(), wrapped.end());
    for (std::size_t i = 1; i < out.size(); ++i) {
        double step = wrapped[i] - wrapped[i - 1];
        double wrapped_step = step - two_pi * std::round(step / two_pi);
        if (wrapped_step <= -std::numbers::pi) {
            wrapped_step += two_pi;
        }
        out[i] = out[i - 1] + wrapped_step;
    }
    return out;
}

/// Instantaneous frequency, in cycles per sample, of an unwrapped phase in
/// radians. Central differences inside, one-sided differences at both ends.
inline std::vector<double> instantaneous_frequency(std::span<const double> phase)
{
    const std::size_t n = phase.size();
    if (n < 3) {
        throw ParameterError("instantaneous_frequency needs at least 3 samples, got " + std::to_string(n));
    }
    std::vector<double> f(n);
    f.front() = (phase[1] - phase[0]) / two_pi;
    f.back() = (phase[n - 1] - phase[n - 2]) / two_pi;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        f[i] = (phase[i + 1] - phase[i - 1]) / (2.0 * two_pi);
    }
    return f;
}

}  // namespace bsar
