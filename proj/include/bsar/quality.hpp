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
#include <optional>
#include <string>
#include <vector>

#include "bsar/core/fft.hpp"
#include "bsar/core/matrix.hpp"
#include "bsar/core/phase.hpp"
#include "bsar/error.hpp"
#include "bsar/estimate.hpp"

namespace bsar {

/// Impulse-response metrics along one cut through the peak.
struct CutMetrics {
    double irw = 0.0;   // samples at -3 dB
    double pslr = 0.0;  // dB
    double islr = 0.0;  // dB
};

struct PointTargetReport {
    double peak_row = 0.0;
    double peak_col = 0.0;
    double peak_magnitude = 0.0;
    double irw_range = 0.0;
    double irw_azimuth = 0.0;
    double pslr_range = 0.0;
    double pslr_azimuth = 0.0;
    double islr_range = 0.0;
    double islr_azimuth = 0.0;
    std::size_t oversample_factor = 16;
};

struct Region {
    Interval rows;
    Interval cols;
};

/// size x size region centred on (row, col), moved inside the image when it
/// would cross an edge.
inline Region centered_region(std::size_t rows, std::size_t cols, double row, double col, std::size_t size)
{
    auto axis = [size](std::size_t n, double c) {
        const std::size_t len = std::min(size, n);
        const double start = std::round(c) - static_cast<double>(len / 2);
        const auto s = static_cast<std::size_t>(std::clamp(start, 0.0, static_cast<double>(n - len)));
        return Interval{s, s + len};
    };
    return {axis(rows, row), axis(cols, col)};
}

namespace detail {

/// Circular spectral centroid, cycles / sample, of a marginal energy profile.
inline double spectral_centroid(const std::vector<double>& energy)
{
    const std::size_t n = energy.size();
    cdouble acc{};
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += energy[k] * std::polar(1.0, two_pi * static_cast<double>(k) / static_cast<double>(n));
        total += energy[k];
    }
    // A flat spectrum has no centroid; leave it unshifted.
    return std::abs(acc) > 1e-9 * total ? std::arg(acc) / two_pi : 0.0;
}

/// Zero-pads an n-point spectrum to n * factor points, splitting the Nyquist
/// bin of an even length between both ends.
inline ComplexVector zero_pad_spectrum(std::span<const cdouble> spec, std::size_t factor)
{
    const std::size_t n = spec.size();
    const std::size_t big = n * factor;
    ComplexVector out(big, cdouble{});
    const std::size_t pos = (n + 1) / 2;  // bins [0, pos) are non-negative
    for (std::size_t k = 0; k < pos; ++k) {
        out[k] = spec[k];
    }
    for (std::size_t k = pos; k < n; ++k) {
        out[big - n + k] = spec[k];
    }
    if (n % 2 == 0) {
        const cdouble nyq = spec[n / 2];
        out[big - n / 2] = 0.5 * nyq;
        out[n / 2] = 0.5 * nyq;
    }
    return out;
}

inline CutMetrics cut_metrics(const std::vector<double>& mag, std::size_t peak, double factor)
{
    const std::size_t n = mag.size();
    const double top = mag[peak];
    const double half_power = top / std::sqrt(2.0);

    auto crossing = [&](int dir) {
        std::size_t i = peak;
        for (std::size_t step = 0; step < n / 2; ++step) {
            const std::size_t j = dir > 0 ? i + 1 : i - 1;
            if (j >= n) {
                break;
            }
            if (mag[j] < half_power) {
                const double frac = (mag[i] - half_power) / (mag[i] - mag[j]);
                return static_cast<double>(i) + dir * frac;
            }
            i = j;
        }
        return static_cast<double>(i);
    };
    auto first_null = [&](int dir) {
        std::size_t i = peak;
        while (true) {
            const std::size_t j = dir > 0 ? i + 1 : i - 1;
            if (j >= n || mag[j] > mag[i]) {
                return i;
            }
            i = j;
        }
    };

    CutMetrics m;
    const double width = crossing(+1) - crossing(-1);
    m.irw = width / factor;
    const std::size_t left = first_null(-1);
    const std::size_t right = first_null(+1);

    double side_peak = 0.0;
    double main_energy = 0.0;
    double side_energy = 0.0;
    const double reach = 10.0 * width;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = mag[i] * mag[i];
        if (i >= left && i <= right) {
            main_energy += p;
            continue;
        }
        side_peak = std::max(side_peak, mag[i]);
        if (std::abs(static_cast<double>(i) - static_cast<double>(peak)) <= reach) {
            side_energy += p;
        }
    }
    m.pslr = side_peak > 0.0 ? 20.0 * std::log10(side_peak / top) : -300.0;
    m.islr = side_energy > 0.0 ? 10.0 * std::log10(side_energy / main_energy) : -300.0;
    return m;
}

}  // namespace detail

/// Oversampled impulse-response analysis of the point target near
/// (approx_row, approx_col). The window is demodulated by its spectral
/// centroid on each axis so the zero-padded interpolation does not split an
/// off-centre spectrum, then cut along the image axes through the peak.
inline PointTargetReport analyze_point_target(const ComplexMatrix& img, double approx_row, double approx_col,
                                              std::size_t window = 64, std::size_t oversample = 16)
{
    if (window < 32) {
        throw ParameterError("analysis window must be at least 32 samples, got " + std::to_string(window));
    }
    if (oversample < 8) {
        throw ParameterError("oversample factor must be at least 8");
    }
    const double r0 = std::round(approx_row) - static_cast<double>(window / 2);
    const double c0 = std::round(approx_col) - static_cast<double>(window / 2);
    if (!(r0 >= 0.0 && c0 >= 0.0 && r0 + static_cast<double>(window) <= static_cast<double>(img.rows()) &&
          c0 + static_cast<double>(window) <= static_cast<double>(img.cols()))) {
        throw ParameterError("analysis window around (" + std::to_string(approx_row) + ", " +
                             std::to_string(approx_col) + ") leaves the image");
    }
    const auto row0 = static_cast<std::size_t>(r0);
    const auto col0 = static_cast<std::size_t>(c0);
    const std::size_t w = window;

    ComplexMatrix patch(w, w);
    std::vector<double> mags;
    mags.reserve(w * w);
    for (std::size_t r = 0; r < w; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            patch(r, c) = img(row0 + r, col0 + c);
            mags.push_back(std::abs(patch(r, c)));
        }
    }
    const double peak = *std::max_element(mags.begin(), mags.end());
    std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2), mags.end());
    const double med = mags[mags.size() / 2];
    if (!(peak > 0.0) || (med > 0.0 && 20.0 * std::log10(peak / med) < 20.0)) {
        throw NoTargetError("no peak 20 dB above the window median near (" + std::to_string(approx_row) + ", " +
                            std::to_string(approx_col) + ")");
    }

    // Per-axis spectral centroids from the 2-D spectrum.
    ComplexMatrix spec = patch;
    dft_rows(spec);
    dft_columns(spec);
    std::vector<double> row_energy(w, 0.0);
    std::vector<double> col_energy(w, 0.0);
    for (std::size_t r = 0; r < w; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const double p = std::norm(spec(r, c));
            row_energy[r] += p;
            col_energy[c] += p;
        }
    }
    const double fr = detail::spectral_centroid(row_energy);
    const double fc = detail::spectral_centroid(col_energy);
    for (std::size_t r = 0; r < w; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const double cycles = std::remainder(-(fr * static_cast<double>(r) + fc * static_cast<double>(c)), 1.0);
            patch(r, c) *= std::polar(1.0, two_pi * cycles);
        }
    }
    spec = patch;
    dft_rows(spec);
    dft_columns(spec);

    // Zero-padded interpolation: rows first, then columns.
    const std::size_t big = w * oversample;
    ComplexMatrix wide(w, big);
    for (std::size_t r = 0; r < w; ++r) {
        const auto padded = detail::zero_pad_spectrum(spec.row(r), oversample);
        std::copy(padded.begin(), padded.end(), wide.row(r).begin());
    }
    ComplexMatrix up(big, big);
    for (std::size_t c = 0; c < big; ++c) {
        auto padded = detail::zero_pad_spectrum(wide.column(c), oversample);
        dft_inplace(padded, true);
        up.set_column(c, padded);
    }
    dft_rows(up, true);

    std::size_t pr = 0;
    std::size_t pc = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < big; ++r) {
        for (std::size_t c = 0; c < big; ++c) {
            const double a = std::abs(up(r, c));
            if (a > best) {
                best = a;
                pr = r;
                pc = c;
            }
        }
    }
    const auto range_cut = magnitude(up.row(pr));
    const auto az_cut = magnitude(up.column(pc));
    const double factor = static_cast<double>(oversample);

    PointTargetReport rep;
    rep.oversample_factor = oversample;
    rep.peak_row = static_cast<double>(row0) + parabolic_peak(az_cut, pr) / factor;
    rep.peak_col = static_cast<double>(col0) + parabolic_peak(range_cut, pc) / factor;
    // The longer inverse transforms scale by 1 / oversample per axis.
    rep.peak_magnitude = best * factor * factor;
    const auto rm = detail::cut_metrics(range_cut, pc, factor);
    const auto am = detail::cut_metrics(az_cut, pr, factor);
    rep.irw_range = rm.irw;
    rep.pslr_range = rm.pslr;
    rep.islr_range = rm.islr;
    rep.irw_azimuth = am.irw;
    rep.pslr_azimuth = am.pslr;
    rep.islr_azimuth = am.islr;
    return rep;
}

struct ImageComparison {
    double correlation = 0.0;
    long row_offset = 0;  // argmax |b| - argmax |a|
    long col_offset = 0;
    double db_rms_difference = 0.0;
    Region region;
};

/// Normalised magnitude correlation, peak offset and dB-magnitude RMS
/// difference (each image normalised to its own peak, floored at -100 dB).
inline ImageComparison compare_images(const ComplexMatrix& a, const ComplexMatrix& b,
                                      std::optional<Region> region = std::nullopt)
{
    if (!a.same_shape(b)) {
        throw ParameterError("compare_images: dimension mismatch " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
    const Region reg = region.value_or(Region{{0, a.rows()}, {0, a.cols()}});
    if (reg.rows.empty() || reg.cols.empty() || reg.rows.stop > a.rows() || reg.cols.stop > a.cols()) {
        throw ParameterError("comparison region outside the images");
    }
    double ab = 0.0, aa = 0.0, bb = 0.0, amax = -1.0, bmax = -1.0;
    std::size_t ar = 0, ac = 0, br = 0, bc = 0;
    for (std::size_t r = reg.rows.start; r < reg.rows.stop; ++r) {
        for (std::size_t c = reg.cols.start; c < reg.cols.stop; ++c) {
            const double x = std::abs(a(r, c));
            const double y = std::abs(b(r, c));
            ab += x * y;
            aa += x * x;
            bb += y * y;
            if (x > amax) {
                amax = x;
                ar = r;
                ac = c;
            }
            if (y > bmax) {
                bmax = y;
                br = r;
                bc = c;
            }
        }
    }
    ImageComparison out;
    out.region = reg;
    out.correlation = (aa > 0.0 && bb > 0.0) ? ab / std::sqrt(aa * bb) : 0.0;
    out.row_offset = static_cast<long>(br) - static_cast<long>(ar);
    out.col_offset = static_cast<long>(bc) - static_cast<long>(ac);

    auto db = [](double x, double peak) {
        constexpr double floor_db = -100.0;
        if (!(peak > 0.0) || x <= 0.0) {
            return floor_db;
        }
        return std::max(floor_db, 20.0 * std::log10(x / peak));
    };
    double sum = 0.0;
    for (std::size_t r = reg.rows.start; r < reg.rows.stop; ++r) {
        for (std::size_t c = reg.cols.start; c < reg.cols.stop; ++c) {
            const double d = db(std::abs(a(r, c)), amax) - db(std::abs(b(r, c)), bmax);
            sum += d * d;
        }
    }
    out.db_rms_difference = std::sqrt(sum / static_cast<double>(reg.rows.length() * reg.cols.length()));
    return out;
}

}  // namespace bsar
