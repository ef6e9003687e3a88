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


#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bsar/core/chirp.hpp"
#include "bsar/core/fft.hpp"
#include "bsar/core/matrix.hpp"
#include "bsar/core/phase.hpp"
#include "bsar/simulate.hpp"
#include "oracles/oracles.hpp"

using namespace bsar;

namespace {

ComplexVector random_vector(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    ComplexVector v(n);
    for (auto& z : v) {
        z = {g(rng), g(rng)};
    }
    return v;
}

double norm2(const ComplexVector& v) { return std::sqrt(energy(v)); }

}  // namespace

TEST(Matrix, ShapeAndAccess)
{
    ComplexMatrix m(2, 3);
    EXPECT_EQ(m.size(), 6u);
    m(1, 2) = {1.0, -2.0};
    EXPECT_EQ(m.row(1)[2], cdouble(1.0, -2.0));
    EXPECT_EQ(m.column(2)[1], cdouble(1.0, -2.0));
    EXPECT_THROW(ComplexMatrix(0, 3), ParameterError);
    EXPECT_THROW(ComplexMatrix(2, 2, ComplexVector(3)), ParameterError);
}

TEST(SynthChirp, ZeroRateIsConstant)
{
    ChirpModel m;
    m.support = {0, 8};
    const auto s = synth_chirp(m, 8);
    for (const auto& z : s) {
        EXPECT_EQ(z, cdouble(1.0, 0.0));
    }
}

TEST(SynthChirp, HalfCycleRate)
{
    ChirpModel m;
    m.rate = 0.5;
    m.support = {0, 4};
    const auto s = synth_chirp(m, 4);
    EXPECT_NEAR(s[1].real(), -1.0, 1e-15);
    EXPECT_NEAR(s[1].imag(), 0.0, 1e-15);
}

TEST(SynthChirp, OutsideSupportIsZeroAndErrors)
{
    ChirpModel m;
    m.rate = 0.01;
    m.support = {3, 9};
    const auto s = synth_chirp(m, 12);
    for (std::size_t i : {0u, 1u, 2u, 9u, 10u, 11u}) {
        EXPECT_EQ(s[i], cdouble(0.0, 0.0));
    }
    EXPECT_THROW(synth_chirp(m, 8), ParameterError);
    m.support = {5, 5};
    EXPECT_THROW(synth_chirp(m, 12), ParameterError);
    m.support = {0, 4};
    m.rate = std::nan("");
    EXPECT_THROW(synth_chirp(m, 4), ParameterError);
}

TEST(SynthChirp, MatchesTransmittedPulse)
{
    AcquisitionConfig cfg;
    const auto pulse = transmitted_pulse(cfg);
    ChirpModel m;
    m.rate = cfg.range_rate_cycles();
    m.center = 0.5 * static_cast<double>(pulse.size() - 1);
    m.support = {0, pulse.size()};
    const auto s = synth_chirp(m, pulse.size());
    cdouble dot{};
    for (std::size_t i = 0; i < s.size(); ++i) {
        dot += s[i] * std::conj(pulse[i]);
    }
    EXPECT_GE(std::abs(dot) / (norm2(s) * norm2(pulse)), 0.999);
}

TEST(SynthChirp, SymmetricAboutVertex)
{
    ChirpModel m;
    m.rate = 0.003;
    m.center = 20.0;
    m.constant = 0.17;
    m.support = {0, 41};
    const auto s = synth_chirp(m, 41);
    for (std::size_t k = 1; k <= 20; ++k) {
        EXPECT_NEAR(std::abs(s[20 + k] - s[20 - k]), 0.0, 1e-12);
    }
}

TEST(SynthChirp, TaperRampsBothEnds)
{
    ChirpModel m;
    m.rate = 0.001;
    m.support = {0, 100};
    m.taper_fraction = 0.1;
    const auto s = synth_chirp(m, 100);
    EXPECT_LT(std::abs(s[0]), 0.05);
    EXPECT_LT(std::abs(s[99]), 0.05);
    EXPECT_NEAR(std::abs(s[50]), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(s[3]), std::abs(s[96]), 1e-15);
}

TEST(ChirpModel, RecenterPreservesPhase)
{
    ChirpModel m;
    m.rate = 0.002;
    m.center = 3.0;
    m.linear = 0.05;
    m.constant = 0.2;
    const auto r = m.recentered(17.5);
    for (double n : {0.0, 4.0, 33.0}) {
        EXPECT_NEAR(m.phase_cycles(n), r.phase_cycles(n), 1e-12);
    }
    const auto v = m.vertex_form();
    EXPECT_NEAR(v.linear, 0.0, 0.0);
    EXPECT_NEAR(v.center, 3.0 - 0.05 / 0.004, 1e-12);
    EXPECT_NEAR(v.phase_cycles(9.0), m.phase_cycles(9.0), 1e-12);
}

TEST(UnwrapPhase, NoJumps)
{
    const std::vector<double> in = {0.0, 1.0, 2.0};
    EXPECT_EQ(unwrap_phase(in), in);
}

TEST(UnwrapPhase, RestoresTwoPi)
{
    const std::vector<double> in = {0.0, 3.0, 6.0 - two_pi};
    const auto out = unwrap_phase(in);
    EXPECT_NEAR(out[2], 6.0, 1e-12);
    EXPECT_EQ(unwrap_phase(out), out);
}

TEST(UnwrapPhase, QuadraticRoundTrip)
{
    std::vector<double> phi(300);
    std::vector<double> wrapped(300);
    for (std::size_t n = 0; n < phi.size(); ++n) {
        const double t = static_cast<double>(n);
        phi[n] = two_pi * (0.0008 * t * t - 0.11 * t + 0.4);
        wrapped[n] = wrap_radians(phi[n]);
    }
    const auto out = unwrap_phase(wrapped);
    const double offset = out[0] - phi[0];
    EXPECT_NEAR(std::remainder(offset, two_pi), 0.0, 1e-9);
    for (std::size_t n = 0; n < phi.size(); ++n) {
        EXPECT_NEAR(out[n] - phi[n], offset, 1e-9);
    }
}

TEST(WrapCycles, Range)
{
    EXPECT_DOUBLE_EQ(wrap_cycles(0.5), 0.5);
    EXPECT_DOUBLE_EQ(wrap_cycles(-0.5), 0.5);
    EXPECT_NEAR(wrap_cycles(1.25), 0.25, 1e-15);
    EXPECT_NEAR(wrap_cycles(-0.75), 0.25, 1e-15);
}

TEST(InstantaneousFrequency, LinearAndQuadratic)
{
    std::vector<double> lin(10);
    std::vector<double> quad(10);
    for (std::size_t n = 0; n < 10; ++n) {
        const double t = static_cast<double>(n);
        lin[n] = two_pi * 0.1 * t;
        quad[n] = two_pi * 1e-3 * t * t;
    }
    for (double f : instantaneous_frequency(lin)) {
        EXPECT_NEAR(f, 0.1, 1e-14);
    }
    const auto fq = instantaneous_frequency(quad);
    for (std::size_t n = 1; n + 1 < 10; ++n) {
        EXPECT_NEAR(fq[n], 0.002 * static_cast<double>(n), 1e-14);
    }
    EXPECT_THROW(instantaneous_frequency(std::vector<double>{0.0, 1.0}), ParameterError);
}

TEST(InstantaneousFrequency, ChirpSlopeAndZeroCrossing)
{
    ChirpModel m;
    m.rate = 0.0015;
    m.center = 61.3;
    m.support = {0, 128};
    const auto s = synth_chirp(m, 128);
    std::vector<double> ph(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        ph[i] = std::arg(s[i]);
    }
    const auto f = instantaneous_frequency(unwrap_phase(ph));
    for (std::size_t n = 2; n + 2 < f.size(); ++n) {
        EXPECT_NEAR(f[n] - f[n - 1], 2.0 * m.rate, 1e-9);
    }
    std::size_t cross = 0;
    for (std::size_t n = 1; n < f.size(); ++n) {
        if (f[n - 1] < 0.0 && f[n] >= 0.0) {
            cross = n;
        }
    }
    const double root = static_cast<double>(cross - 1) + (-f[cross - 1]) / (f[cross] - f[cross - 1]);
    EXPECT_NEAR(root, m.center, 0.5);
}

TEST(Dft, Impulse)
{
    const auto out = dft(ComplexVector{1.0, 0.0, 0.0, 0.0});
    for (const auto& z : out) {
        EXPECT_NEAR(std::abs(z - cdouble(1.0, 0.0)), 0.0, 1e-15);
    }
}

TEST(Dft, RoundTripNonPowerOfTwo)
{
    const auto x = random_vector(1000, 3);
    const auto y = dft(dft(x), true);
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        err = std::max(err, std::abs(x[i] - y[i]));
    }
    EXPECT_LT(err, 1e-12 * norm2(x));
}

TEST(Dft, MatchesNaiveOracle)
{
    for (std::size_t n : {16u, 7u, 30u}) {
        const auto x = random_vector(n, n);
        const auto fast = dft(x);
        const auto slow = oracle::naive_dft(x);
        const auto fast_inv = dft(x, true);
        const auto slow_inv = oracle::naive_dft(x, true);
        for (std::size_t k = 0; k < n; ++k) {
            EXPECT_LT(std::abs(fast[k] - slow[k]), 1e-12 * norm2(x) * std::sqrt(static_cast<double>(n)));
            EXPECT_LT(std::abs(fast_inv[k] - slow_inv[k]), 1e-12 * norm2(x));
        }
    }
}

TEST(Dft, ParsevalAndLinearity)
{
    const auto x = random_vector(257, 5);
    const auto y = random_vector(257, 6);
    const auto fx = dft(x);
    EXPECT_NEAR(energy(fx) / 257.0, energy(x), 1e-12 * energy(x));

    const cdouble a(0.3, -1.1);
    const cdouble b(2.0, 0.5);
    ComplexVector mix(257);
    for (std::size_t i = 0; i < 257; ++i) {
        mix[i] = a * x[i] + b * y[i];
    }
    const auto fm = dft(mix);
    const auto fy = dft(y);
    double err = 0.0;
    for (std::size_t k = 0; k < 257; ++k) {
        err = std::max(err, std::abs(fm[k] - (a * fx[k] + b * fy[k])));
    }
    EXPECT_LT(err, 1e-12 * std::sqrt(energy(fm)));
}

TEST(Dft, FastLengthAndDelay)
{
    EXPECT_EQ(fast_length(1), 1u);
    EXPECT_EQ(fast_length(11), 12u);
    EXPECT_EQ(fast_length(1151), 1152u);
    EXPECT_EQ(fast_length(1024), 1024u);

    ComplexVector x(16, cdouble{});
    x[2] = 1.0;
    auto spec = dft(x);
    apply_delay(spec, 3.0);
    const auto shifted = dft(spec, true);
    EXPECT_NEAR(std::abs(shifted[5] - cdouble(1.0, 0.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(shifted[2]), 0.0, 1e-14);
}

TEST(Dft, Deterministic)
{
    const auto x = random_vector(1152, 9);
    EXPECT_EQ(dft(x), dft(x));
}
