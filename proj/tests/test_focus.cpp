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

#include <gtest/gtest.h>

#include "bsar/focus.hpp"
#include "bsar/quality.hpp"
#include "bsar/simulate.hpp"
#include "oracles/oracles.hpp"

using namespace bsar;

namespace {

AcquisitionConfig default_config(double noise = 0.0397635)
{
    AcquisitionConfig cfg;
    cfg.noise_sigma = noise;
    return cfg;
}

Scatterer target(double eta = 0.256, double offset = 40.0)
{
    Scatterer s;
    s.azimuth_time = eta;
    s.range_offset = offset;
    return s;
}

std::pair<std::size_t, std::size_t> argmax(const ComplexMatrix& m)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < m.size(); ++i) {
        if (std::norm(m.data()[i]) > std::norm(m.data()[best])) {
            best = i;
        }
    }
    return {best / m.cols(), best % m.cols()};
}

ComplexMatrix oracle_range_compress(const SimulationResult& sim)
{
    const auto pulse = transmitted_pulse(sim.truth.config);
    return range_compress(sim.raw, pulse, 0.5 * static_cast<double>(pulse.size() - 1));
}

}  // namespace

TEST(RangeCompress, SelfCorrelationPeak)
{
    AcquisitionConfig cfg;
    const auto ref = transmitted_pulse(cfg);
    ComplexMatrix row(1, 1024);
    std::copy(ref.begin(), ref.end(), row.row(0).begin());
    const auto out = range_compress(row, ref);
    const auto mag = magnitude(out.row(0));
    const auto peak = static_cast<std::size_t>(std::max_element(mag.begin(), mag.end()) - mag.begin());
    EXPECT_EQ(peak, 0u);
    EXPECT_NEAR(mag[0], energy(ref), 1e-9 * energy(ref));

    // Matches direct correlation.
    const auto direct = oracle::direct_correlation({row.row(0).begin(), row.row(0).end()}, ref);
    for (std::size_t i = 0; i < 1024; i += 7) {
        EXPECT_NEAR(std::abs(out(0, i) - direct[i]), 0.0, 1e-9 * energy(ref));
    }
}

TEST(RangeCompress, SelfCorrelationSidelobes)
{
    AcquisitionConfig cfg;
    const auto ref = transmitted_pulse(cfg);
    ComplexMatrix img(64, 1024);
    for (std::size_t r = 0; r < 64; ++r) {
        std::copy(ref.begin(), ref.end(), img.row(r).begin() + 400);
    }
    const auto rc = range_compress(img, ref, 0.5 * static_cast<double>(ref.size() - 1));
    const auto rep = analyze_point_target(rc, 32.0, 400.0 + 63.5, 64);
    const double k = cfg.range_rate_cycles();
    const auto expect =
        oracle::profile_metrics([&](double t) { return oracle::chirp_autocorrelation(k, ref.size(), t); }, -30.0,
                                30.0, 1.0 / 64.0);
    EXPECT_NEAR(expect.pslr, -13.26, 0.35);
    EXPECT_NEAR(rep.pslr_range, expect.pslr, 0.2);
    EXPECT_NEAR(rep.irw_range, expect.irw, 0.05 * expect.irw);
    EXPECT_NEAR(rep.peak_col, 463.5, 0.05);
}

TEST(RangeCompress, ZeroRowAndShiftInvariance)
{
    AcquisitionConfig cfg;
    const auto ref = transmitted_pulse(cfg);
    ComplexMatrix zero(2, 512);
    const auto z = range_compress(zero, ref);
    EXPECT_EQ(z.frobenius_norm_squared(), 0.0);

    ComplexMatrix two(1, 1024);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        two(0, 200 + i) += ref[i];
        two(0, 300 + i) += ref[i];
    }
    const auto out = range_compress(two, ref);
    EXPECT_NEAR(std::abs(out(0, 200)), std::abs(out(0, 300)), 1e-9 * std::abs(out(0, 200)));
    const auto mag = magnitude(out.row(0));
    for (std::size_t i = 0; i < mag.size(); ++i) {
        if (i != 200 && i != 300) {
            EXPECT_LT(mag[i], mag[200]);
        }
    }
    EXPECT_THROW(range_compress(ComplexMatrix(1, 64), ref), ParameterError);
}

TEST(TrackRcm, MatchesTruthOnDefaultScene)
{
    const auto sim = simulate_raw(default_config(), {target()});
    const auto est = estimate_blind(sim.raw);
    const auto rc = oracle_range_compress(sim);
    const auto rcm = track_rcm(rc, est.beam_envelope, est.beam_peak_index);
    const auto& t = sim.truth.scatterers.front();
    const auto rows = detect_support(est.beam_envelope, 0.1);
    double sum = 0.0;
    for (std::size_t m = rows.start; m < rows.stop; ++m) {
        const double fitted = rcm.reference_range_bin + rcm.migration(static_cast<double>(m) - rcm.reference_pulse);
        const double truth = t.focused_col + t.rcm[m];
        sum += (fitted - truth) * (fitted - truth);
    }
    EXPECT_LT(std::sqrt(sum / static_cast<double>(rows.length())), 0.25);
    EXPECT_EQ(rcm.source, RcmSource::peak_tracking);
}

TEST(TrackRcm, ZeroMigration)
{
    AcquisitionConfig cfg;
    const auto ref = transmitted_pulse(cfg);
    ComplexMatrix raw(256, 512);
    std::vector<double> env(256, 0.0);
    for (std::size_t r = 60; r < 200; ++r) {
        std::copy(ref.begin(), ref.end(), raw.row(r).begin() + 150);
        env[r] = 1.0 - std::abs(static_cast<double>(r) - 130.0) / 100.0;
    }
    const auto rc = range_compress(raw, ref);
    const auto rcm = track_rcm(rc, env, 130.0);
    EXPECT_LT(std::abs(rcm.quadratic), 1e-3);
    EXPECT_NEAR(rcm.reference_range_bin, 150.0, 1e-6);
}

TEST(TrackRcm, DoubledMigrationDoublesCurvature)
{
    // Halving the closest range at fixed dwell doubles the quadratic
    // migration coefficient v^2 / R.
    auto cfg = default_config(0.0);
    cfg.closest_range = 640.0;  // R0 + offset: 680 -> 340
    const auto a = simulate_raw(cfg, {target()});
    const auto b = simulate_raw(default_config(0.0), {target()});
    const auto ea = estimate_blind(a.raw);
    const auto eb = estimate_blind(b.raw);
    const auto ra = track_rcm(oracle_range_compress(a), ea.beam_envelope, ea.beam_peak_index);
    const auto rb = track_rcm(oracle_range_compress(b), eb.beam_envelope, eb.beam_peak_index);
    EXPECT_NEAR(rb.quadratic / ra.quadratic, 2.0, 0.1);
}

TEST(TrackRcm, TooFewPulses)
{
    ComplexMatrix rc(64, 64);
    std::vector<double> env(64, 0.0);
    env[30] = 1.0;
    rc(30, 10) = 1.0;
    EXPECT_THROW(track_rcm(rc, env, 30.0), TrackingError);
}

TEST(Rcmc, ZeroModelIsAzimuthDft)
{
    const auto sim = simulate_raw(default_config(), {target()});
    const auto rc = oracle_range_compress(sim);
    RcmModel zero;
    auto expect = rc;
    dft_columns(expect);
    EXPECT_EQ(rcmc(rc, zero, -0.001, 0.0), expect);
    EXPECT_THROW(rcmc(rc, zero, 0.0, 0.0), ParameterError);
}

TEST(Rcmc, SingleBinShift)
{
    // Every column holds the same azimuth tone at bin k; the range profile is
    // an impulse at column 100.
    const std::size_t m = 64;
    const std::size_t n = 256;
    const std::size_t bin = 12;
    ComplexMatrix rc(m, n);
    for (std::size_t r = 0; r < m; ++r) {
        rc(r, 100) = std::polar(1.0, two_pi * static_cast<double>(bin * r) / static_cast<double>(m));
    }
    RcmModel model;
    model.quadratic = 0.125;
    const double f = static_cast<double>(bin) / static_cast<double>(m);
    const double rate = f / 16.0;  // tone sits at d = 8 pulses
    const double shift = model.migration(f / (2.0 * rate));  // d = f / (2K) with dc = 0
    ASSERT_NEAR(shift, std::round(shift), 1e-12);
    const auto rd = rcmc(rc, model, rate, 0.0);
    const auto mag = magnitude(rd.row(bin));
    const auto peak = static_cast<std::size_t>(std::max_element(mag.begin(), mag.end()) - mag.begin());
    EXPECT_EQ(static_cast<double>(peak), 100.0 - shift);
    EXPECT_NEAR(mag[peak], static_cast<double>(m), 1e-9);
}

TEST(Rcmc, ImplausibleMigration)
{
    ComplexMatrix rc(32, 64);
    rc(0, 0) = 1.0;
    RcmModel model;
    model.quadratic = 1000.0;
    EXPECT_THROW(rcmc(rc, model, 0.001, 0.0), ImplausibleMigrationError);
}

TEST(Rcmc, StraightensTrajectory)
{
    const auto sim = simulate_raw(default_config(), {target()});
    const auto est = estimate_blind(sim.raw);
    StageDumps d;
    focus_pipeline(sim.raw, est, {}, &d);
    const auto rows = detect_support(est.beam_envelope, 0.1);
    const auto center = static_cast<std::size_t>(std::lround(sim.truth.scatterers.front().focused_col));
    const double before = peak_spread(track_peaks(d.range_compressed, rows, center, 32));
    auto after_m = d.range_doppler;
    dft_columns(after_m, true);
    const double after = peak_spread(track_peaks(after_m, rows, center, 32));
    EXPECT_GT(before, 2.0);
    EXPECT_LT(after, 1.0);
}

TEST(AzimuthCompress, ImpulseReferenceIsInverseDft)
{
    const auto sim = simulate_raw(default_config(), {target()});
    auto rd = oracle_range_compress(sim);
    dft_columns(rd);
    const ComplexVector impulse = {cdouble(1.0, 0.0)};
    auto expect = rd;
    dft_columns(expect, true);
    EXPECT_EQ(azimuth_compress(rd, impulse), expect);
}

TEST(FocusPipeline, BlindPeakAtTruth)
{
    const auto sim = simulate_raw(default_config(), {target()});
    const auto est = estimate_blind(sim.raw);
    const auto img = focus_pipeline(sim.raw, est);
    const auto [r, c] = argmax(img.image);
    const auto& t = sim.truth.scatterers.front();
    EXPECT_LE(std::abs(static_cast<double>(r) - t.focused_row), 1.0);
    EXPECT_LE(std::abs(static_cast<double>(c) - t.focused_col), 1.0);
    EXPECT_EQ(img.provenance, Provenance::blind);
    EXPECT_EQ(img.estimate_hash.size(), 16u);
    EXPECT_TRUE(img.single_azimuth_reference);
}

TEST(FocusPipeline, BlindMatchesOracle)
{
    const auto sim = simulate_raw(default_config(), {target()});
    const auto blind = focus_pipeline(sim.raw, estimate_blind(sim.raw));
    const auto oracle_img = focus_oracle(sim.raw, sim.truth);
    const auto& t = sim.truth.scatterers.front();
    const auto region = centered_region(512, 1024, t.focused_row, t.focused_col, 64);
    EXPECT_GE(compare_images(blind.image, oracle_img.image, region).correlation, 0.98);
    EXPECT_EQ(oracle_img.provenance, Provenance::oracle);
}

TEST(FocusPipeline, OracleResolution)
{
    const auto sim = simulate_raw(default_config(), {target()});
    FocusOptions opts;
    opts.taper_fraction = 0.0;
    const auto img = focus_oracle(sim.raw, sim.truth, opts);
    const auto& t = sim.truth.scatterers.front();
    const auto rep = analyze_point_target(img.image, t.focused_row, t.focused_col);
    const double theory = oracle::sinc_irw() / sim.truth.bandwidth_fraction;
    EXPECT_NEAR(rep.irw_range, theory, 0.10 * theory);
}

TEST(FocusPipeline, Linearity)
{
    auto cfg = default_config(0.0);
    const Scatterer a = target();
    Scatterer b = target(0.27, 52.0);
    b.reflectivity = {0.3, 0.2};
    const auto sa = simulate_raw(cfg, {a});
    const auto sb = simulate_raw(cfg, {b});
    auto sum_raw = sa.raw;
    sum_raw += sb.raw;
    const auto est = estimate_blind(sa.raw);
    FocusOptions opts;
    opts.rcm_override = track_rcm(range_compress(sa.raw, build_references(est).range, build_references(est).range_origin),
                                  est.beam_envelope, est.beam_peak_index);
    const auto fa = focus_pipeline(sa.raw, est, opts).image;
    const auto fb = focus_pipeline(sb.raw, est, opts).image;
    const auto fs = focus_pipeline(sum_raw, est, opts).image;
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        err += std::norm(fs.data()[i] - fa.data()[i] - fb.data()[i]);
        ref += std::norm(fs.data()[i]);
    }
    EXPECT_LT(std::sqrt(err / ref), 1e-9);
}

TEST(FocusPipeline, RangeShiftCovariance)
{
    auto cfg = default_config(0.0);
    const auto a = simulate_raw(cfg, {target()});
    // 3 samples further in range: 3 * c / (2 fs) metres.
    const auto b = simulate_raw(cfg, {target(0.256, 40.0 + 3.0 * speed_of_light / (2.0 * cfg.range_sampling_rate))});
    const auto est = estimate_blind(a.raw);
    FocusOptions opts;
    opts.rcm_override = analytic_rcm(a.truth);
    const auto pa = argmax(focus_pipeline(a.raw, est, opts).image);
    const auto pb = argmax(focus_pipeline(b.raw, est, opts).image);
    EXPECT_EQ(pb.first, pa.first);
    EXPECT_EQ(pb.second, pa.second + 3);
}

TEST(FocusPipeline, ArgmaxStableUnderScaling)
{
    const auto sim = simulate_raw(default_config(), {target()});
    const auto est = estimate_blind(sim.raw);
    auto scaled = sim.raw;
    scaled *= cdouble(3.25, 0.0);
    EXPECT_EQ(argmax(focus_pipeline(sim.raw, est).image), argmax(focus_pipeline(scaled, est).image));
}

TEST(FocusPipeline, StageErrorsCarryStage)
{
    const auto sim = simulate_raw(default_config(), {target()});
    auto est = estimate_blind(sim.raw);
    est.azimuth_chirp.rate = 1e-12;  // absurd migration mapping
    try {
        focus_pipeline(sim.raw, est);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.stage(), "rcmc");
    }
}

TEST(FocusPipeline, RangeCompressionEnergyGain)
{
    // A unit-modulus linear-FM reference of L samples spanning a fraction B of
    // the band has a flat spectrum of power L / B there, so matched filtering
    // multiplies echo energy by about L / B.
    const auto sim = simulate_raw(default_config(0.0), {target()});
    const auto rc = oracle_range_compress(sim);
    const double gain = rc.frobenius_norm_squared() / sim.raw.frobenius_norm_squared();
    const double expect = static_cast<double>(sim.truth.chirp_length) / sim.truth.bandwidth_fraction;
    EXPECT_NEAR(gain, expect, 0.15 * expect);
}
