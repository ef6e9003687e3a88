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
#include "bsar/decompose.hpp"
#include "bsar/error.hpp"

namespace bsar {

/// Widest contiguous interval around the global peak where
/// envelope >= threshold_fraction * peak.
inline Interval detect_support(std::span<const double> envelope, double threshold_fraction)
{
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
        throw ParameterError("threshold_fraction must lie in (0, 1)");
    }
    if (envelope.empty()) {
        throw NoSignalError("detect_support on an empty envelope");
    }
    const auto peak_it = std::max_element(envelope.begin(), envelope.end());
    const double peak = *peak_it;
    if (!(peak > 0.0) || !std::isfinite(peak)) {
        throw NoSignalError("envelope has no positive peak");
    }
    const double level = threshold_fraction * peak;
    auto start = static_cast<std::size_t>(peak_it - envelope.begin());
    std::size_t stop = start + 1;
    while (start > 0 && envelope[start - 1] >= level) {
        --start;
    }
    while (stop < envelope.size() && envelope[stop] >= level) {
        ++stop;
    }
    return {start, stop};
}

/// Centred moving average; near the ends the mean is over the samples that exist.
inline std::vector<double> boxcar_smooth(std::span<const double> x, std::size_t window)
{
    const std::size_t n = x.size();
    const std::size_t half = window / 2;
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        prefix[i + 1] = prefix[i] + x[i];
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n, i + half + 1);
        out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    }
    return out;
}

/// Boxcar length for envelope smoothing: max(5, support_hint / 50), odd.
inline std::size_t smoothing_window(std::size_t support_hint) noexcept
{
    std::size_t w = std::max<std::size_t>(5, support_hint / 50);
    return w | 1u;
}

/// Parabolic vertex through (i-1, i, i+1); returns i when the samples are flat
/// or i sits on an end.
inline double parabolic_peak(std::span<const double> y, std::size_t i) noexcept
{
    if (i == 0 || i + 1 >= y.size()) {
        return static_cast<double>(i);
    }
    const double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
    if (denom >= 0.0) {
        return static_cast<double>(i);
    }
    const double offset = 0.5 * (y[i - 1] - y[i + 1]) / denom;
    return static_cast<double>(i) + std::clamp(offset, -0.5, 0.5);
}

struct EnvelopeSupport {
    std::vector<double> envelope;  // smoothed magnitude
    Interval support;
    std::size_t window = 5;
};

/// Smoothed magnitude and its thresholded support. A boxcar of length w
/// widens a sharp edge by (w - 1) / 2 samples at the threshold, so interior
/// edges are pulled back by that amount.
inline EnvelopeSupport envelope_support(std::span<const cdouble> signal, double threshold_fraction)
{
    const auto mag = magnitude(signal);
    const auto first_pass = detect_support(boxcar_smooth(mag, 5), threshold_fraction);
    EnvelopeSupport es;
    es.window = smoothing_window(first_pass.length());
    es.envelope = boxcar_smooth(mag, es.window);
    Interval s = detect_support(es.envelope, threshold_fraction);
    const std::size_t half = (es.window - 1) / 2;
    const std::size_t peak =
        static_cast<std::size_t>(std::max_element(es.envelope.begin(), es.envelope.end()) - es.envelope.begin());
    if (s.start > 0) {
        s.start = std::min(s.start + half, peak);
    }
    if (s.stop < signal.size()) {
        s.stop = std::max(s.stop - std::min(half, s.stop), peak + 1);
    }
    es.support = s;
    return es;
}

struct PhaseFit {
    ChirpModel model;
    double residual_rms = 0.0;  // cycles, magnitude-weighted
};

/// Magnitude-weighted least-squares fit of
///   phase(n) = K (n - n0)^2 + b (n - n0) + c0      [cycles]
/// to the unwrapped phase of `signal` over `support`. The signal is first
/// demodulated by its mean phase increment so that unwrapping only has to
/// follow the residual sweep; this keeps Doppler-shifted chirps whose
/// frequency crosses +-0.5 cycles/sample unwrappable. The model is expanded
/// around `origin` (default: support.start).
inline PhaseFit fit_quadratic_phase(std::span<const cdouble> signal, Interval support,
                                    std::optional<double> origin = std::nullopt)
{
    if (support.length() < 8) {
        throw ParameterError("fit_quadratic_phase needs a support of at least 8 samples, got " +
                             std::to_string(support.length()));
    }
    if (support.stop > signal.size()) {
        throw ParameterError("support exceeds the signal length");
    }
    const std::size_t len = support.length();
    const auto seg = signal.subspan(support.start, len);

    cdouble lag{};
    for (std::size_t i = 1; i < len; ++i) {
        lag += seg[i] * std::conj(seg[i - 1]);
    }
    const double coarse = std::arg(lag) / two_pi;

    std::vector<double> wrapped(len);
    for (std::size_t i = 0; i < len; ++i) {
        const double demod = std::remainder(-coarse * static_cast<double>(i), 1.0);
        wrapped[i] = std::arg(seg[i] * std::polar(1.0, two_pi * demod));
    }
    const auto unwrapped = unwrap_phase(wrapped);

    // Centred, scaled abscissa for conditioning.
    const double mid = 0.5 * static_cast<double>(len - 1);
    const double scale = std::max(mid, 1.0);
    Eigen::MatrixXd a(static_cast<Eigen::Index>(len), 3);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(len));
    std::size_t weighted = 0;
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        const double w = std::abs(seg[i]);
        const double sw = std::sqrt(w);
        const double t = (static_cast<double>(i) - mid) / scale;
        const auto row = static_cast<Eigen::Index>(i);
        a(row, 0) = sw * t * t;
        a(row, 1) = sw * t;
        a(row, 2) = sw;
        rhs(row) = sw * unwrapped[i] / two_pi;
        weighted += w > 0.0 ? 1 : 0;
        weight_sum += w;
    }
    if (weighted < 3) {
        throw DegenerateFitError("fewer than three non-zero samples in the fit support");
    }
    const auto qr = a.colPivHouseholderQr();
    if (qr.rank() < 3) {
        throw DegenerateFitError("rank-deficient phase fit");
    }
    const Eigen::VectorXd coef = qr.solve(rhs);

    const double rate = coef(0) / (scale * scale);
    // Curvature below 1e-6 cycles across the half support is no chirp.
    if (!(std::abs(rate) * mid * mid > 1e-6) || !std::isfinite(rate)) {
        throw DegenerateFitError("phase has no quadratic term (K = 0)");
    }

    const Eigen::VectorXd resid = a * coef - rhs;
    PhaseFit fit;
    fit.residual_rms = std::sqrt(resid.squaredNorm() / weight_sum);

    const double centre = static_cast<double>(support.start) + mid;
    ChirpModel m;
    m.rate = rate;
    m.center = centre;
    m.support = support;
    m.linear = coef(1) / scale + coarse;
    m.constant = coef(2) + coarse * mid;
    fit.model = m.recentered(origin.value_or(static_cast<double>(support.start)));
    return fit;
}

struct EstimateOptions {
    std::size_t k = 10;
    double svd_tol = 1e-10;
    std::size_t max_iter = 1000;
    double dominance_gate = 3.0;
    double threshold_fraction = 0.1;
};

/// Every quantity the blind pipeline extracts from the raw matrix.
struct BlindEstimate {
    ChirpModel range_chirp;    // vertex form: center is the zero-frequency sample
    ChirpModel azimuth_chirp;  // expanded at beam_peak_index: linear == Doppler at the beam centre
    double doppler_centroid = 0.0;  // cycles / pulse in (-0.5, 0.5]
    std::vector<double> beam_envelope;
    double beam_peak_index = 0.0;
    double dominance_ratio = 0.0;
    double range_fit_rms = 0.0;
    double azimuth_fit_rms = 0.0;
    std::vector<double> singular_values;
};

struct AzimuthEstimate {
    ChirpModel chirp;
    double doppler_centroid = 0.0;
    std::vector<double> beam_envelope;
    double beam_peak_index = 0.0;
    double fit_rms = 0.0;
};

/// Azimuth reference, beam pattern and Doppler centroid from the first left
/// singular vector. The beam centre is the peak of |u1| (smoothed over an
/// eighth of the support so that speckle-like ripple on a flat top does not
/// move it); the Doppler centroid is the fitted instantaneous frequency
/// there.
inline AzimuthEstimate estimate_azimuth(std::span<const cdouble> u1, double threshold_fraction = 0.1)
{
    auto es = envelope_support(u1, threshold_fraction);
    AzimuthEstimate est;
    est.beam_envelope = es.envelope;

    const std::size_t peak_window = std::max(es.window, es.support.length() / 8) | 1u;
    const auto wide = boxcar_smooth(magnitude(u1), peak_window);
    std::size_t imax = es.support.start;
    for (std::size_t i = es.support.start; i < es.support.stop; ++i) {
        if (wide[i] > wide[imax]) {
            imax = i;
        }
    }
    est.beam_peak_index = parabolic_peak(wide, imax);

    const auto fit = fit_quadratic_phase(u1, es.support, est.beam_peak_index);
    est.chirp = fit.model;
    est.fit_rms = fit.residual_rms;
    est.doppler_centroid = wrap_cycles(est.chirp.frequency(est.beam_peak_index));
    return est;
}

/// Clean reference samples of a chirp model over its own support, tapered.
inline ComplexVector reference_from_model(const ChirpModel& model, double taper_fraction, double& origin)
{
    ChirpModel m = model;
    m.taper_fraction = taper_fraction;
    const auto full = synth_chirp(m, m.support.stop);
    origin = m.vertex() - static_cast<double>(m.support.start);
    return ComplexVector(full.begin() + static_cast<std::ptrdiff_t>(m.support.start), full.end());
}

/// Largest range-compressed magnitude of `raw` against an untapered model.
inline double compression_peak(const RawDataMatrix& raw, const ChirpModel& model)
{
    double origin = 0.0;
    const auto ref = reference_from_model(model, 0.0, origin);
    const auto rc = range_compress(raw, ref, origin);
    double best = 0.0;
    for (const auto& z : rc.data()) {
        best = std::max(best, std::norm(z));
    }
    return std::sqrt(best);
}

struct RangeEstimate {
    ChirpModel chirp;  // vertex form
    double fit_rms = 0.0;
};


/// Range chirp from the first right singular vector. With X ~ sigma u v^H a
/// row of X carries conj(v1); when `raw` is given both conjugation choices
/// are tried and the one compressing the raw data to the higher peak kept.
inline RangeEstimate estimate_range(std::span<const cdouble> v1, const RawDataMatrix* raw = nullptr,
                                    double threshold_fraction = 0.1)
{
    const auto es = envelope_support(v1, threshold_fraction);
    const auto fit = fit_quadratic_phase(v1, es.support);
    ChirpModel as_is = fit.model.vertex_form();
    ChirpModel conj = fit.model;
    conj.rate = -conj.rate;
    conj.linear = -conj.linear;
    conj.constant = -conj.constant;
    conj = conj.vertex_form();

    RangeEstimate est{conj, fit.residual_rms};
    if (raw != nullptr && compression_peak(*raw, as_is) > compression_peak(*raw, conj)) {
        est.chirp = as_is;
    }
    return est;
}

/// Reference functions ready for matched filtering. `*_origin` is the index
/// inside the reference of its zero-Doppler / zero-frequency sample; the
/// compressors map that sample to output lag zero.
struct FocusReferences {
    ComplexVector range;
    double range_origin = 0.0;
    ComplexVector azimuth;
    double azimuth_origin = 0.0;
};

inline FocusReferences build_references(const BlindEstimate& estimate, double taper_fraction = 0.1)
{
    FocusReferences refs;
    refs.range = reference_from_model(estimate.range_chirp, taper_fraction, refs.range_origin);
    refs.azimuth = reference_from_model(estimate.azimuth_chirp, taper_fraction, refs.azimuth_origin);
    return refs;
}

/// Full blind parameter extraction from a raw matrix: truncated SVD, gate on
/// sigma_1 / sigma_2, then azimuth from u1 and range from v1.
inline BlindEstimate estimate_blind(const RawDataMatrix& raw, const EstimateOptions& options = {},
                                    TruncatedSvd* svd_out = nullptr)
{
    if (options.k < 2) {
        throw ParameterError("blind estimation needs k >= 2 for the dominance gate");
    }
    auto svd = leading_triplets(raw, options.k, options.svd_tol, options.max_iter);
    const auto spectrum = singular_spectrum(svd);
    if (svd_out != nullptr) {
        *svd_out = svd;
    }
    if (svd.leading_degenerate) {
        throw UnsuitableSceneError("leading singular value is degenerate; no dominant scatterer");
    }
    if (!(spectrum.dominance_ratio >= options.dominance_gate)) {
        throw UnsuitableSceneError("dominance ratio sigma1/sigma2 = " + std::to_string(spectrum.dominance_ratio) +
                                   " below gate " + std::to_string(options.dominance_gate));
    }

    const auto u1 = svd.left_vector(0);
    const auto v1 = svd.right_vector(0);
    const auto az = estimate_azimuth(u1, options.threshold_fraction);
    const auto rg = estimate_range(v1, &raw, options.threshold_fraction);

    BlindEstimate est;
    est.range_chirp = rg.chirp;
    est.range_fit_rms = rg.fit_rms;
    est.azimuth_chirp = az.chirp;
    est.azimuth_fit_rms = az.fit_rms;
    est.doppler_centroid = az.doppler_centroid;
    est.beam_envelope = az.beam_envelope;
    est.beam_peak_index = az.beam_peak_index;
    est.dominance_ratio = spectrum.dominance_ratio;
    est.singular_values = spectrum.values;
    return est;
}

/// Order-sensitive FNV-1a fingerprint of every estimate field.
inline std::uint64_t estimate_fingerprint(const BlindEstimate& e)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix_bytes = [&h](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    };
    auto mix = [&](double v) { mix_bytes(&v, sizeof v); };
    auto mix_model = [&](const ChirpModel& m) {
        mix(m.rate);
        mix(m.center);
        mix(static_cast<double>(m.support.start));
        mix(static_cast<double>(m.support.stop));
        mix(m.taper_fraction);
        mix(m.linear);
        mix(m.constant);
    };
    mix_model(e.range_chirp);
    mix_model(e.azimuth_chirp);
    mix(e.doppler_centroid);
    mix(e.beam_peak_index);
    mix(e.dominance_ratio);
    for (double v : e.beam_envelope) {
        mix(v);
    }
    return h;
}

}  // namespace bsar
