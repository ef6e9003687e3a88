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

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "bsar/core/matrix.hpp"
#include "bsar/core/phase.hpp"

namespace bsar {

namespace detail {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (length, direction) under a lock and
// reused. FFTW_ESTIMATE | FFTW_UNALIGNED keeps the chosen algorithm
// independent of buffer alignment, so identical inputs give identical bits.
class FftPlanCache {
public:
    static FftPlanCache& instance()
    {
        static FftPlanCache cache;
        return cache;
    }

    fftw_plan get(std::size_t n, bool inverse)
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(n, inverse);
        if (auto it = plans_.find(key); it != plans_.end()) {
            return it->second;
        }
        std::vector<std::complex<double>> scratch(n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

    FftPlanCache(const FftPlanCache&) = delete;
    FftPlanCache& operator=(const FftPlanCache&) = delete;

private:
    FftPlanCache() = default;
    ~FftPlanCache()
    {
        for (auto& [key, plan] : plans_) {
            fftw_destroy_plan(plan);
        }
    }

    std::mutex mutex_;
    std::map<std::pair<std::size_t, bool>, fftw_plan> plans_;
};

}  // namespace detail

/// In-place DFT of exactly x.size() points. The inverse carries the 1/n
/// factor so that inverse(forward(x)) == x.
inline void dft_inplace(std::span<cdouble> x, bool inverse = false)
{
    const std::size_t n = x.size();
    if (n == 0) {
        return;
    }
    auto* buf = reinterpret_cast<fftw_complex*>(x.data());
    fftw_execute_dft(detail::FftPlanCache::instance().get(n, inverse), buf, buf);
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& z : x) {
            z *= scale;
        }
    }
}

inline ComplexVector dft(std::span<const cdouble> x, bool inverse = false)
{
    ComplexVector out(x.begin(), x.end());
    dft_inplace(out, inverse);
    return out;
}

/// Smallest 2^a 3^b 5^c 7^d that is >= n.
inline std::size_t fast_length(std::size_t n)
{
    if (n <= 1) {
        return 1;
    }
    for (std::size_t m = n;; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2u, 3u, 5u, 7u}) {
            while (r % p == 0) {
                r /= p;
            }
        }
        if (r == 1) {
            return m;
        }
    }
}

/// Normalised frequency of DFT bin k of an n-point transform, in cycles per
/// sample, mapped into [-0.5, 0.5).
inline double bin_frequency(std::size_t k, std::size_t n) noexcept
{
    const double f = static_cast<double>(k) / static_cast<double>(n);
    return f >= 0.5 ? f - 1.0 : f;
}

/// Multiplies a spectrum by exp(-j 2 pi f delay), i.e. delays the underlying
/// signal by `delay` samples (fractional allowed, circular).
inline void apply_delay(std::span<cdouble> spectrum, double delay)
{
    const std::size_t n = spectrum.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double cycles = std::remainder(-bin_frequency(k, n) * delay, 1.0);
        spectrum[k] *= std::polar(1.0, two_pi * cycles);
    }
}

/// Column-wise DFT of a matrix (azimuth direction for radar data).
inline void dft_columns(ComplexMatrix& m, bool inverse = false)
{
    ComplexVector col(m.rows());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        for (std::size_t r = 0; r < m.rows(); ++r) {
            col[r] = m(r, c);
        }
        dft_inplace(col, inverse);
        m.set_column(c, col);
    }
}

/// Row-wise DFT of a matrix (range direction for radar data).
inline void dft_rows(ComplexMatrix& m, bool inverse = false)
{
    for (std::size_t r = 0; r < m.rows(); ++r) {
        dft_inplace(m.row(r), inverse);
    }
}

}  // namespace bsar
