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
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "bsar/core/fft.hpp"
#include "bsar/core/matrix.hpp"
#include "bsar/core/phase.hpp"
#include "bsar/error.hpp"

namespace bsar {

inline constexpr double speed_of_light = 299792458.0;

/// Stripmap acquisition geometry and radar parameters. These are exactly the
/// quantities the blind estimator never reads; the simulator and the oracle
/// focuser are their only consumers.
struct AcquisitionConfig {
    double wavelength = 0.03;             // m
    double platform_speed = 100.0;        // m/s
    double closest_range = 300.0;         // m, slant range of range column 0
    double prf = 1000.0;                  // Hz
    double range_sampling_rate = 2.0e9;   // Hz
    double chirp_rate = 9.375e15;         // Hz/s
    double chirp_duration = 6.4e-8;       // s
    double beam_azimuth_extent = 0.36;    // s, main-lobe dwell (null to null)
    double squint_offset = 0.0;           // s, beam centre minus zero-Doppler time
    std::size_t num_pulses = 512;
    std::size_t samples_per_pulse = 1024;
    double noise_sigma = 0.0;             // std of each of I and Q
    std::uint64_t rng_seed = 1;

    std::size_t chirp_length() const noexcept
    {
        return static_cast<std::size_t>(std::lround(chirp_duration * range_sampling_rate));
    }

    /// Range chirp rate in cycles / sample^2.
    double range_rate_cycles() const noexcept
    {
        return chirp_rate / (2.0 * range_sampling_rate * range_sampling_rate);
    }

    /// Transmitted bandwidth as a fraction of the range sampling rate.
    double bandwidth_fraction() const noexcept { return chirp_rate * chirp_duration / range_sampling_rate; }

    void validate() const
    {
        auto positive = [](double v, const char* name) {
            if (!(std::isfinite(v) && v > 0.0)) {
                throw ConfigurationError(std::string(name) + " must be finite and > 0");
            }
        };
        positive(wavelength, "wavelength");
        positive(platform_speed, "platform_speed");
        positive(closest_range, "closest_range");
        positive(prf, "prf");
        positive(range_sampling_rate, "range_sampling_rate");
        positive(chirp_rate, "chirp_rate");
        positive(chirp_duration, "chirp_duration");
        positive(beam_azimuth_extent, "beam_azimuth_extent");
        if (!std::isfinite(squint_offset)) {
            throw ConfigurationError("squint_offset must be finite");
        }
        if (!(std::isfinite(noise_sigma) && noise_sigma >= 0.0)) {
            throw ConfigurationError("noise_sigma must be finite and >= 0");
        }
        if (num_pulses == 0 || samples_per_pulse == 0) {
            throw ConfigurationError("num_pulses and samples_per_pulse must be >= 1");
        }
        if (chirp_rate * chirp_duration > range_sampling_rate * (1.0 + 1e-12)) {
            throw ConfigurationError("transmitted bandwidth chirp_rate*chirp_duration exceeds range_sampling_rate");
        }
        if (beam_azimuth_extent * prf > static_cast<double>(num_pulses)) {
            throw ConfigurationError("beam_azimuth_extent*prf exceeds num_pulses");
        }
        const std::size_t len = chirp_length();
        if (len < 2 || len > samples_per_pulse) {
            throw ConfigurationError("chirp length " + std::to_string(len) + " samples does not fit in a pulse of " +
                                     std::to_string(samples_per_pulse) + " samples");
        }
    }
};

struct Scatterer {
    double azimuth_time = 0.0;   // s, zero-Doppler crossing
    double range_offset = 0.0;   // m, added to closest_range
    cdouble reflectivity{1.0, 0.0};
};

/// Analytic truth for one scatterer.
struct ScattererTruth {
    double focused_row = 0.0;            // zero-Doppler pulse index
    double focused_col = 0.0;            // chirp-centre column at the beam-centre pulse
    double closest_approach_col = 0.0;   // chirp-centre column at zero Doppler
    double beam_center_row = 0.0;
    double azimuth_rate = 0.0;           // cycles / pulse^2
    double doppler_centroid = 0.0;       // cycles / pulse, wrapped
    std::vector<double> rcm;             // per pulse, samples relative to the beam-centre pulse
};

struct GroundTruth {
    AcquisitionConfig config;
    std::vector<Scatterer> scene;
    double range_rate = 0.0;             // cycles / sample^2
    double bandwidth_fraction = 0.0;
    std::size_t chirp_length = 0;
    std::vector<ScattererTruth> scatterers;
};

struct SimulationResult {
    RawDataMatrix raw;
    GroundTruth truth;
};

namespace detail {

inline double sinc(double x) noexcept
{
    if (x == 0.0) {
        return 1.0;
    }
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

inline std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double slant_range(const AcquisitionConfig& cfg, const Scatterer& s, double eta) noexcept
{
    const double r0 = cfg.closest_range + s.range_offset;
    const double along = cfg.platform_speed * (eta - s.azimuth_time);
    return std::sqrt(r0 * r0 + along * along);
}

/// Range-column delay of the pulse leading edge for slant range r.
inline double delay_columns(const AcquisitionConfig& cfg, double r) noexcept
{
    return 2.0 * (r - cfg.closest_range) / speed_of_light * cfg.range_sampling_rate;
}

inline double beam_center_time(const AcquisitionConfig& cfg, const Scatterer& s) noexcept
{
    return s.azimuth_time + cfg.squint_offset;
}

/// Normalised off-boresight coordinate: +-1 at the first nulls.
inline double beam_coordinate(const AcquisitionConfig& cfg, const Scatterer& s, double eta) noexcept
{
    return (eta - beam_center_time(cfg, s)) / (0.5 * cfg.beam_azimuth_extent);
}

}  // namespace detail

/// Two-way azimuth amplitude weight: squared cardinal sine, main lobe only.
inline double beam_weight(const AcquisitionConfig& cfg, const Scatterer& s, double eta) noexcept
{
    const double x = detail::beam_coordinate(cfg, s, eta);
    if (std::abs(x) >= 1.0) {
        return 0.0;
    }
    const double g = detail::sinc(x);
    return g * g;
}

/// |x| at which the two-way pattern falls to `fraction` of its peak.
inline double beam_fraction_coordinate(double fraction)
{
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double g = detail::sinc(mid);
        (g * g >= fraction ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// The transmitted linear-FM pulse exp(j pi Kr t^2), t centred on the pulse.
inline ComplexVector transmitted_pulse(const AcquisitionConfig& cfg)
{
    const std::size_t len = cfg.chirp_length();
    ComplexVector pulse(len);
    const double mid = 0.5 * static_cast<double>(len - 1);
    for (std::size_t i = 0; i < len; ++i) {
        const double t = (static_cast<double>(i) - mid) / cfg.range_sampling_rate;
        const double cycles = std::remainder(0.5 * cfg.chirp_rate * t * t, 1.0);
        pulse[i] = std::polar(1.0, two_pi * cycles);
    }
    return pulse;
}

inline GroundTruth ground_truth(const AcquisitionConfig& cfg, const std::vector<Scatterer>& scene)
{
    GroundTruth truth;
    truth.config = cfg;
    truth.scene = scene;
    truth.range_rate = cfg.range_rate_cycles();
    truth.bandwidth_fraction = cfg.bandwidth_fraction();
    truth.chirp_length = cfg.chirp_length();
    const double half_pulse = 0.5 * static_cast<double>(truth.chirp_length - 1);
    const double v2 = cfg.platform_speed * cfg.platform_speed;
    for (const auto& s : scene) {
        ScattererTruth t;
        const double eta_c = detail::beam_center_time(cfg, s);
        const double r0 = cfg.closest_range + s.range_offset;
        const double r_c = detail::slant_range(cfg, s, eta_c);
        const double d_c = detail::delay_columns(cfg, r_c);
        t.focused_row = s.azimuth_time * cfg.prf;
        t.focused_col = d_c + half_pulse;
        t.closest_approach_col = detail::delay_columns(cfg, r0) + half_pulse;
        t.beam_center_row = eta_c * cfg.prf;
        t.azimuth_rate = -v2 / (cfg.wavelength * r0 * cfg.prf * cfg.prf);
        t.doppler_centroid = wrap_cycles(-2.0 * v2 * cfg.squint_offset / (cfg.wavelength * r_c * cfg.prf));
        t.rcm.resize(cfg.num_pulses);
        for (std::size_t m = 0; m < cfg.num_pulses; ++m) {
            const double eta = static_cast<double>(m) / cfg.prf;
            t.rcm[m] = detail::delay_columns(cfg, detail::slant_range(cfg, s, eta)) - d_c;
        }
        truth.scatterers.push_back(std::move(t));
    }
    return truth;
}

/// Stripmap raw echoes of a point-scatterer scene (stop-and-go, rectilinear
/// track). Each echo is the transmitted pulse delayed by 2R/c with an exact
/// fractional delay, rotated by exp(-j 4 pi R / lambda) and weighted by the
/// two-way beam. Noise rows use independent streams derived from (seed, row).
inline SimulationResult simulate_raw(const AcquisitionConfig& cfg, const std::vector<Scatterer>& scene)
{
    cfg.validate();
    const std::size_t rows = cfg.num_pulses;
    const std::size_t cols = cfg.samples_per_pulse;
    const std::size_t len = cfg.chirp_length();

    // Every illuminated echo must land entirely inside the grid.
    for (std::size_t i = 0; i < scene.size(); ++i) {
        const auto& s = scene[i];
        const double eta_c = detail::beam_center_time(cfg, s);
        const double half = 0.5 * cfg.beam_azimuth_extent;
        const double first = (eta_c - half) * cfg.prf;
        const double last = (eta_c + half) * cfg.prf;
        if (!std::isfinite(first) || first < 0.0 || last > static_cast<double>(rows - 1) || s.range_offset < 0.0) {
            throw ConfigurationError("scatterer " + std::to_string(i) + ": illuminated pulses [" +
                                     std::to_string(first) + ", " + std::to_string(last) + "] leave the " +
                                     std::to_string(rows) + "-pulse grid");
        }
        const double d_near = detail::delay_columns(cfg, detail::slant_range(cfg, s, s.azimuth_time));
        const double r_far = std::max(detail::slant_range(cfg, s, eta_c - half), detail::slant_range(cfg, s, eta_c + half));
        const double d_far = detail::delay_columns(cfg, r_far);
        if (d_near < 0.0 || d_far + static_cast<double>(len) > static_cast<double>(cols)) {
            throw ConfigurationError("scatterer " + std::to_string(i) + ": echo columns [" + std::to_string(d_near) +
                                     ", " + std::to_string(d_far + static_cast<double>(len)) + ") leave the " +
                                     std::to_string(cols) + "-sample range window");
        }
    }

    SimulationResult result{RawDataMatrix(rows, cols), ground_truth(cfg, scene)};
    auto& raw = result.raw;

    const std::size_t padded = fast_length(cols + 2 * len);
    ComplexVector pulse_spectrum(padded, cdouble{});
    {
        const auto pulse = transmitted_pulse(cfg);
        std::copy(pulse.begin(), pulse.end(), pulse_spectrum.begin());
        dft_inplace(pulse_spectrum);
    }

    ComplexVector echo(padded);
    for (const auto& s : scene) {
        for (std::size_t m = 0; m < rows; ++m) {
            const double eta = static_cast<double>(m) / cfg.prf;
            const double w = beam_weight(cfg, s, eta);
            if (w == 0.0) {
                continue;
            }
            const double r = detail::slant_range(cfg, s, eta);
            const double carrier = std::remainder(-2.0 * r / cfg.wavelength, 1.0);
            const cdouble amplitude = s.reflectivity * w * std::polar(1.0, two_pi * carrier);

            std::copy(pulse_spectrum.begin(), pulse_spectrum.end(), echo.begin());
            apply_delay(echo, detail::delay_columns(cfg, r));
            dft_inplace(echo, true);
            auto out = raw.row(m);
            for (std::size_t n = 0; n < cols; ++n) {
                out[n] += amplitude * echo[n];
            }
        }
    }

    if (cfg.noise_sigma > 0.0) {
        for (std::size_t m = 0; m < rows; ++m) {
            std::mt19937_64 rng(detail::splitmix64(cfg.rng_seed ^ detail::splitmix64(m + 1)));
            std::normal_distribution<double> gauss(0.0, cfg.noise_sigma);
            for (auto& z : raw.row(m)) {
                const double re = gauss(rng);
                const double im = gauss(rng);
                z += cdouble(re, im);
            }
        }
    }
    return result;
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

struct Histogram {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<std::size_t> counts;
};

struct RawStatistics {
    Moments real;
    Moments imag;
    Histogram real_histogram;
    Histogram imag_histogram;
};

namespace detail {

template <typename Part>
Moments moments_of(std::span<const cdouble> x, Part part)
{
    Moments mo;
    const double n = static_cast<double>(x.size());
    double sum = 0.0;
    for (const auto& z : x) {
        sum += part(z);
    }
    mo.mean = sum / n;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (const auto& z : x) {
        const double d = part(z) - mo.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    mo.variance = m2;
    if (m2 > 0.0) {
        mo.skewness = m3 / std::pow(m2, 1.5);
        mo.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return mo;
}

template <typename Part>
Histogram histogram_of(std::span<const cdouble> x, Part part, double lower, double upper, std::size_t bins)
{
    Histogram h{lower, upper, std::vector<std::size_t>(bins, 0)};
    const double width = (upper - lower) / static_cast<double>(bins);
    for (const auto& z : x) {
        const double idx = std::floor((part(z) - lower) / width);
        const auto b = static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(bins - 1)));
        ++h.counts[b];
    }
    return h;
}

}  // namespace detail

/// Moments of the I and Q channels plus a 64-bin histogram spanning +-4 std
/// (values beyond the range fall in the end bins).
inline RawStatistics raw_statistics(const RawDataMatrix& raw, std::size_t bins = 64)
{
    if (raw.empty()) {
        throw ParameterError("raw_statistics on an empty matrix");
    }
    auto re = [](const cdouble& z) { return z.real(); };
    auto im = [](const cdouble& z) { return z.imag(); };
    RawStatistics st;
    st.real = detail::moments_of(raw.data(), re);
    st.imag = detail::moments_of(raw.data(), im);
    double spread = 4.0 * std::sqrt(std::max(st.real.variance, st.imag.variance));
    if (spread == 0.0) {
        spread = 1.0;
    }
    st.real_histogram = detail::histogram_of(raw.data(), re, -spread, spread, bins);
    st.imag_histogram = detail::histogram_of(raw.data(), im, -spread, spread, bins);
    return st;
}

}  // namespace bsar
