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
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bsar/core/chirp.hpp"
#include "bsar/core/correlate.hpp"
#include "bsar/core/fft.hpp"
#include "bsar/core/matrix.hpp"
#include "bsar/core/phase.hpp"
#include "bsar/error.hpp"
#include "bsar/estimate.hpp"
#include "bsar/simulate.hpp"

namespace bsar {

enum class RcmSource { peak_tracking, analytic_oracle, fixed };

inline const char* to_string(RcmSource s) noexcept
{
    switch (s) {
    case RcmSource::peak_tracking: return "peak-tracking";
    case RcmSource::analytic_oracle: return "analytic-oracle";
    case RcmSource::fixed: return "fixed";
    }
    return "unknown";
}

/// Range migration relative to the beam-centre pulse:
///   dR(d) = linear * d + quadratic * d^2   [samples], d = pulse - reference_pulse
struct RcmModel {
    double reference_range_bin = 0.0;
    double reference_pulse = 0.0;
    double linear = 0.0;
    double quadratic = 0.0;
    double fit_rms = 0.0;
    RcmSource source = RcmSource::peak_tracking;

    double migration(double pulse_offset) const noexcept
    {
        return (quadratic * pulse_offset + linear) * pulse_offset;
    }
};

struct PeakSample {
    std::size_t pulse = 0;
    double position = 0.0;  // fractional range bin
};

/// Per-row range peaks in [center_col - halfwidth, center_col + halfwidth],
/// parabolically refined. Rows whose maximum sits on the window edge are
/// skipped (the peak left the window).
inline std::vector<PeakSample> track_peaks(const ComplexMatrix& m, Interval rows, std::size_t center_col,
                                           std::size_t halfwidth)
{
    std::vector<PeakSample> out;
    const std::size_t lo = center_col > halfwidth ? center_col - halfwidth : 0;
    const std::size_t hi = std::min(m.cols(), center_col + halfwidth + 1);
    std::vector<double> mag(hi - lo);
    for (std::size_t r = rows.start; r < std::min(rows.stop, m.rows()); ++r) {
        const auto row = m.row(r);
        for (std::size_t c = lo; c < hi; ++c) {
            mag[c - lo] = std::abs(row[c]);
        }
        const auto imax = static_cast<std::size_t>(std::max_element(mag.begin(), mag.end()) - mag.begin());
        if (mag[imax] == 0.0 || imax == 0 || imax + 1 == mag.size()) {
            continue;
        }
        out.push_back({r, static_cast<double>(lo) + parabolic_peak(mag, imax)});
    }
    return out;
}

/// max - min of the tracked positions.
inline double peak_spread(std::span<const PeakSample> peaks)
{
    if (peaks.empty()) {
        return 0.0;
    }
    const auto [lo, hi] = std::minmax_element(peaks.begin(), peaks.end(),
                                              [](const PeakSample& a, const PeakSample& b) { return a.position < b.position; });
    return hi->position - lo->position;
}

namespace detail {

struct QuadFit {
    double c0 = 0.0, c1 = 0.0, c2 = 0.0, rms = 0.0;
    std::vector<double> residuals;
};

inline QuadFit fit_quadratic(std::span<const PeakSample> peaks, double x0)
{
    const auto n = static_cast<Eigen::Index>(peaks.size());
    double scale = 1.0;
    for (const auto& p : peaks) {
        scale = std::max(scale, std::abs(static_cast<double>(p.pulse) - x0));
    }
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = (static_cast<double>(peaks[static_cast<std::size_t>(i)].pulse) - x0) / scale;
        a(i, 0) = 1.0;
        a(i, 1) = t;
        a(i, 2) = t * t;
        y(i) = peaks[static_cast<std::size_t>(i)].position;
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd r = y - a * c;
    QuadFit f;
    f.c0 = c(0);
    f.c1 = c(1) / scale;
    f.c2 = c(2) / (scale * scale);
    f.rms = std::sqrt(r.squaredNorm() / static_cast<double>(n));
    f.residuals.assign(r.data(), r.data() + n);
    return f;
}

inline double median(std::vector<double> v)
{
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return m;
}

}  // namespace detail

inline constexpr std::size_t min_tracked_pulses = 16;

/// Blind migration curve from the dominant scatterer in range-compressed
/// data: per-pulse peaks inside the beam support, quadratic least squares
/// around the beam-centre pulse, one round of 3 x MAD outlier rejection.
inline RcmModel track_rcm(const ComplexMatrix& rc, std::span<const double> beam_envelope, double beam_peak_index,
                          std::size_t search_halfwidth = 32, double threshold_fraction = 0.1)
{
    if (beam_envelope.size() != rc.rows()) {
        throw ParameterError("beam envelope length does not match the number of pulses");
    }
    const Interval rows = detect_support(beam_envelope, threshold_fraction);
    const auto ref_row = static_cast<std::size_t>(
        std::clamp(std::lround(beam_peak_index), 0L, static_cast<long>(rc.rows() - 1)));
    const auto ref_mag = magnitude(rc.row(ref_row));
    const auto center_col =
        static_cast<std::size_t>(std::max_element(ref_mag.begin(), ref_mag.end()) - ref_mag.begin());

    auto peaks = track_peaks(rc, rows, center_col, search_halfwidth);
    if (peaks.size() < min_tracked_pulses) {
        throw TrackingError("only " + std::to_string(peaks.size()) + " valid range peaks inside the beam support");
    }
    auto fit = detail::fit_quadratic(peaks, beam_peak_index);

    std::vector<double> dev(fit.residuals.size());
    const double med = detail::median(fit.residuals);
    for (std::size_t i = 0; i < dev.size(); ++i) {
        dev[i] = std::abs(fit.residuals[i] - med);
    }
    const double mad = detail::median(dev);
    if (mad > 0.0) {
        std::vector<PeakSample> kept;
        for (std::size_t i = 0; i < peaks.size(); ++i) {
            if (dev[i] <= 3.0 * mad) {
                kept.push_back(peaks[i]);
            }
        }
        if (kept.size() < min_tracked_pulses) {
            throw TrackingError("only " + std::to_string(kept.size()) + " range peaks survive outlier rejection");
        }
        if (kept.size() != peaks.size()) {
            fit = detail::fit_quadratic(kept, beam_peak_index);
        }
    }

    RcmModel m;
    m.reference_range_bin = fit.c0;
    m.reference_pulse = beam_peak_index;
    m.linear = fit.c1;
    m.quadratic = fit.c2;
    m.fit_rms = fit.rms;
    m.source = RcmSource::peak_tracking;
    if (!std::isfinite(m.fit_rms)) {
        throw TrackingError("non-finite migration fit");
    }
    return m;
}

/// Migration correction in the range-Doppler domain. Azimuth frequency f of
/// bin k is taken in (dc - 0.5, dc + 0.5] and mapped to the pulse offset
///   d = (f - dc) / (2 * azimuth_rate),
/// which is where a chirp of that rate passes through f under the
/// exp(-j 2 pi f n) transform convention. Each range line is shifted by
/// -dR(d). The result stays in the range-Doppler domain.
inline ComplexMatrix rcmc(const ComplexMatrix& rc, const RcmModel& rcm, double azimuth_rate, double doppler_centroid)
{
    if (!(azimuth_rate != 0.0) || !std::isfinite(azimuth_rate)) {
        throw ParameterError("rcmc needs a finite non-zero azimuth rate");
    }
    ComplexMatrix rd = rc;
    dft_columns(rd);
    const std::size_t m = rd.rows();
    const double limit = 0.25 * static_cast<double>(rd.cols());
    for (std::size_t k = 0; k < m; ++k) {
        const double f = doppler_centroid + wrap_cycles(bin_frequency(k, m) - doppler_centroid);
        const double offset = (f - doppler_centroid) / (2.0 * azimuth_rate);
        const double shift = rcm.migration(offset);
        if (!(std::abs(shift) <= limit)) {
            throw ImplausibleMigrationError("migration of " + std::to_string(shift) + " samples at azimuth bin " +
                                            std::to_string(k) + " exceeds N/4");
        }
        if (shift == 0.0) {
            continue;
        }
        auto line = rd.row(k);
        dft_inplace(line);
        apply_delay(line, -shift);
        dft_inplace(line, true);
    }
    return rd;
}

/// Azimuth matched filter on range-Doppler data, then inverse azimuth DFT.
/// Same group-delay rule as range_compress: a phase history whose
/// zero-Doppler sample sits at pulse p focuses at row p when `origin` is the
/// reference's own zero-Doppler index.
inline ComplexMatrix azimuth_compress(const ComplexMatrix& rd, std::span<const cdouble> ref, double origin = 0.0)
{
    const std::size_t m = rd.rows();
    if (ref.empty() || ref.size() > m) {
        throw ParameterError("azimuth reference length " + std::to_string(ref.size()) + " must lie in [1, " +
                             std::to_string(m) + "]");
    }
    ComplexVector filter(m, cdouble{});
    std::copy(ref.begin(), ref.end(), filter.begin());
    dft_inplace(filter);
    for (auto& z : filter) {
        z = std::conj(z);
    }
    if (origin != 0.0) {
        apply_delay(filter, origin);
    }
    ComplexMatrix out = rd;
    for (std::size_t k = 0; k < m; ++k) {
        for (auto& z : out.row(k)) {
            z *= filter[k];
        }
    }
    dft_columns(out, true);
    return out;
}

enum class Provenance { blind, oracle };

inline const char* to_string(Provenance p) noexcept { return p == Provenance::blind ? "blind" : "oracle"; }

struct FocusedImage {
    ComplexMatrix image;
    Provenance provenance = Provenance::blind;
    std::string estimate_hash;
    RcmModel rcm;
    bool single_azimuth_reference = true;  // one reference for every range bin
};

struct FocusOptions {
    double taper_fraction = 0.1;
    std::size_t search_halfwidth = 32;
    std::optional<RcmModel> rcm_override;  // skip tracking and use this curve
};

/// Intermediate products, filled when a pointer is passed.
struct StageDumps {
    ComplexMatrix range_compressed;
    ComplexMatrix range_doppler;
    RcmModel rcm;
};

inline std::string hex64(std::uint64_t v)
{
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

namespace detail {

template <typename F>
auto run_stage(const char* stage, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (Error& e) {
        if (e.stage().empty()) {
            e.set_stage(stage);
        }
        throw;
    }
}

inline FocusedImage focus_with(const RawDataMatrix& raw, const FocusReferences& refs,
                               const std::function<RcmModel(const ComplexMatrix&)>& rcm_of, double azimuth_rate,
                               double doppler_centroid, StageDumps* dumps)
{
    auto rc = run_stage("range_compress", [&] { return range_compress(raw, refs.range, refs.range_origin); });
    const auto rcm = run_stage("track_rcm", [&] { return rcm_of(rc); });
    auto rd = run_stage("rcmc", [&] { return rcmc(rc, rcm, azimuth_rate, doppler_centroid); });
    FocusedImage out;
    out.image = run_stage("azimuth_compress",
                          [&] { return azimuth_compress(rd, refs.azimuth, refs.azimuth_origin); });
    out.rcm = rcm;
    if (dumps != nullptr) {
        dumps->range_compressed = std::move(rc);
        dumps->range_doppler = std::move(rd);
        dumps->rcm = rcm;
    }
    return out;
}

}  // namespace detail

/// Blind range-Doppler focusing from a BlindEstimate.
inline FocusedImage focus_pipeline(const RawDataMatrix& raw, const BlindEstimate& estimate,
                                   const FocusOptions& options = {}, StageDumps* dumps = nullptr)
{
    const auto refs =
        detail::run_stage("references", [&] { return build_references(estimate, options.taper_fraction); });
    auto rcm_of = [&](const ComplexMatrix& rc) {
        if (options.rcm_override) {
            return *options.rcm_override;
        }
        return track_rcm(rc, estimate.beam_envelope, estimate.beam_peak_index, options.search_halfwidth);
    };
    auto out = detail::focus_with(raw, refs, rcm_of, estimate.azimuth_chirp.rate, estimate.doppler_centroid, dumps);
    out.provenance = Provenance::blind;
    out.estimate_hash = hex64(estimate_fingerprint(estimate));
    return out;
}

/// Analytic migration of the first scatterer: Taylor coefficients of the
/// hyperbolic range history at the beam-centre pulse.
inline RcmModel analytic_rcm(const GroundTruth& truth)
{
    if (truth.scene.empty()) {
        throw ParameterError("ground truth has no scatterers");
    }
    const auto& cfg = truth.config;
    const auto& s = truth.scene.front();
    const double eta_c = detail::beam_center_time(cfg, s);
    const double r = detail::slant_range(cfg, s, eta_c);
    const double r0 = cfg.closest_range + s.range_offset;
    const double v2 = cfg.platform_speed * cfg.platform_speed;
    const double d1 = v2 * (eta_c - s.azimuth_time) / r;    // dR/deta
    const double d2 = v2 * r0 * r0 / (r * r * r);           // d2R/deta2
    const double per_metre = 2.0 * cfg.range_sampling_rate / speed_of_light;
    RcmModel m;
    m.reference_pulse = eta_c * cfg.prf;
    m.reference_range_bin = truth.scatterers.front().focused_col;
    m.linear = per_metre * d1 / cfg.prf;
    m.quadratic = per_metre * d2 / (2.0 * cfg.prf * cfg.prf);
    m.source = RcmSource::analytic_oracle;
    return m;
}

/// Reference functions built from the simulator's true parameters: the
/// transmitted pulse and the exact hyperbolic phase history of the first
/// scatterer over its true 10% beam support.
inline FocusReferences oracle_references(const GroundTruth& truth, double taper_fraction)
{
    if (truth.scene.empty()) {
        throw ParameterError("ground truth has no scatterers");
    }
    const auto& cfg = truth.config;
    const auto& s = truth.scene.front();
    FocusReferences refs;

    refs.range = transmitted_pulse(cfg);
    const auto rw = raised_cosine_taper(refs.range.size(), taper_fraction);
    for (std::size_t i = 0; i < refs.range.size(); ++i) {
        refs.range[i] *= rw[i];
    }
    refs.range_origin = 0.5 * static_cast<double>(refs.range.size() - 1);

    const double half = beam_fraction_coordinate(0.1) * 0.5 * cfg.beam_azimuth_extent * cfg.prf;
    const double centre = detail::beam_center_time(cfg, s) * cfg.prf;
    const auto last = static_cast<double>(cfg.num_pulses - 1);
    const auto first_row = static_cast<std::size_t>(std::clamp(std::ceil(centre - half), 0.0, last));
    const auto last_row = static_cast<std::size_t>(std::clamp(std::floor(centre + half), 0.0, last));
    const std::size_t len = last_row - first_row + 1;
    const auto aw = raised_cosine_taper(len, taper_fraction);
    const double r_vertex = cfg.closest_range + s.range_offset;
    refs.azimuth.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
        const double eta = static_cast<double>(first_row + i) / cfg.prf;
        const double cycles = std::remainder(-2.0 * (detail::slant_range(cfg, s, eta) - r_vertex) / cfg.wavelength, 1.0);
        refs.azimuth[i] = std::polar(aw[i], two_pi * cycles);
    }
    refs.azimuth_origin = s.azimuth_time * cfg.prf - static_cast<double>(first_row);
    return refs;
}

/// FNV-1a over the acquisition parameters and scene.
inline std::uint64_t truth_fingerprint(const GroundTruth& truth)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](double v) {
        const auto* b = reinterpret_cast<const unsigned char*>(&v);
        for (std::size_t i = 0; i < sizeof v; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    };
    const auto& c = truth.config;
    for (double v : {c.wavelength, c.platform_speed, c.closest_range, c.prf, c.range_sampling_rate, c.chirp_rate,
                     c.chirp_duration, c.beam_azimuth_extent, c.squint_offset, c.noise_sigma}) {
        mix(v);
    }
    mix(static_cast<double>(c.num_pulses));
    mix(static_cast<double>(c.samples_per_pulse));
    mix(static_cast<double>(c.rng_seed));
    for (const auto& s : truth.scene) {
        mix(s.azimuth_time);
        mix(s.range_offset);
        mix(s.reflectivity.real());
        mix(s.reflectivity.imag());
    }
    return h;
}

/// Focusing with the simulator's true parameters, the benchmark for blind
/// references.
inline FocusedImage focus_oracle(const RawDataMatrix& raw, const GroundTruth& truth, const FocusOptions& options = {},
                                 StageDumps* dumps = nullptr)
{
    if (truth.scatterers.empty()) {
        throw ParameterError("ground truth has no scatterers");
    }
    const auto refs = detail::run_stage("references", [&] { return oracle_references(truth, options.taper_fraction); });
    const auto rcm = options.rcm_override.value_or(analytic_rcm(truth));
    auto rcm_of = [&](const ComplexMatrix&) { return rcm; };
    const auto& st = truth.scatterers.front();
    auto out = detail::focus_with(raw, refs, rcm_of, st.azimuth_rate, st.doppler_centroid, dumps);
    out.provenance = Provenance::oracle;
    out.estimate_hash = hex64(truth_fingerprint(truth));
    return out;
}

}  // namespace bsar
