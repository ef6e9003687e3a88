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
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "bsar/core/matrix.hpp"
#include "bsar/core/phase.hpp"
#include "bsar/error.hpp"

namespace bsar {

/// Quadratic phase law
///
///   phase(n) = rate * (n - center)^2 + linear * (n - center) + constant   [cycles]
///
/// active on the half-open sample interval `support`. `rate` is the chirp
/// rate for range references and the Doppler rate for azimuth references;
/// `linear` carries a Doppler-centroid offset when the expansion point is
/// not the phase vertex.
struct ChirpModel {
    double rate = 0.0;           // cycles / sample^2
    double center = 0.0;         // expansion point, fractional sample index
    Interval support;            // [start, stop)
    double taper_fraction = 0.0; // raised-cosine ramp length / support length, per side
    double linear = 0.0;         // cycles / sample
    double constant = 0.0;       // cycles

    double phase_cycles(double n) const noexcept
    {
        const double d = n - center;
        return (rate * d + linear) * d + constant;
    }

    double frequency(double n) const noexcept { return 2.0 * rate * (n - center) + linear; }

    /// Sample index where the instantaneous frequency crosses zero.
    double vertex() const noexcept { return center - linear / (2.0 * rate); }

    /// Same phase law expanded around another point.
    ChirpModel recentered(double new_center) const noexcept
    {
        ChirpModel out = *this;
        out.center = new_center;
        out.linear = frequency(new_center);
        out.constant = phase_cycles(new_center);
        return out;
    }

    /// Vertex form: expansion point at the zero-frequency sample, linear term 0.
    ChirpModel vertex_form() const noexcept
    {
        ChirpModel out = recentered(vertex());
        out.linear = 0.0;
        return out;
    }

    void validate() const
    {
        if (!std::isfinite(rate) || !std::isfinite(center) || !std::isfinite(linear) ||
            !std::isfinite(constant) || !std::isfinite(taper_fraction)) {
            throw ParameterError("chirp model has non-finite parameters");
        }
        if (support.stop <= support.start) {
            throw ParameterError("chirp support [" + std::to_string(support.start) + ", " +
                                 std::to_string(support.stop) + ") is empty");
        }
        if (taper_fraction < 0.0 || taper_fraction > 0.5) {
            throw ParameterError("taper fraction " + std::to_string(taper_fraction) + " outside [0, 0.5]");
        }
    }

    friend bool operator==(const ChirpModel&, const ChirpModel&) = default;
};

/// Raised-cosine amplitude window of `length` samples with ramps of
/// round(taper_fraction * length) samples at both ends.
inline std::vector<double> raised_cosine_taper(std::size_t length, double taper_fraction)
{
    std::vector<double> w(length, 1.0);
    const auto ramp = static_cast<std::size_t>(std::lround(taper_fraction * static_cast<double>(length)));
    if (ramp == 0) {
        return w;
    }
    for (std::size_t j = 0; j < ramp && j < length; ++j) {
        const double g = 0.5 * (1.0 - std::cos(std::numbers::pi * (static_cast<double>(j) + 0.5) /
                                               static_cast<double>(ramp)));
        w[j] = std::min(w[j], g);
        w[length - 1 - j] = std::min(w[length - 1 - j], g);
    }
    return w;
}

/// Samples the chirp on [0, length); samples outside the support are zero.
inline ComplexVector synth_chirp(const ChirpModel& model, std::size_t length)
{
    model.validate();
    if (length < model.support.stop) {
        throw ParameterError("chirp length " + std::to_string(length) + " shorter than support end " +
                             std::to_string(model.support.stop));
    }
    ComplexVector out(length, cdouble{0.0, 0.0});
    const auto taper = raised_cosine_taper(model.support.length(), model.taper_fraction);
    for (std::size_t n = model.support.start; n < model.support.stop; ++n) {
        // Reduce to a fractional cycle first; keeps long chirps accurate.
        const double cycles = std::remainder(model.phase_cycles(static_cast<double>(n)), 1.0);
        out[n] = std::polar(taper[n - model.support.start], two_pi * cycles);
    }
    return out;
}

}  // namespace bsar
