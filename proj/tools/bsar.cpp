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


// bsar: command-line front end.
//
//   simulate  --config cfg.json --out raw.bsar [--truth truth.json]
//   estimate  --in raw.bsar --out est.json [--k 10] [--gate 3] [--spectrum sv.csv]
//   focus     --in raw.bsar (--est est.json | --oracle truth.json) --out slc.bsar
//             [--dump-stages dir] [--taper 0.1]
//   analyze   --in slc.bsar --row r --col c --out report.csv [--window 64] [--oversample 16]
//   compare   --a a.bsar --b b.bsar --out cmp.json [--row r --col c --window 64]
//   render    --in img.bsar --db -40 --out img.pgm
//   stats     --in raw.bsar --out stats.json

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bsar.hpp"

namespace {

using namespace bsar;
using io::json;

std::string one_line(std::string s)
{
    for (auto& ch : s) {
        if (ch == '\n' || ch == '\r') {
            ch = ' ';
        }
    }
    return s;
}

int report(ErrorCode code, const std::string& stage, const std::string& message)
{
    const int status = exit_status(code);
    std::cerr << "bsar: error: code=" << to_string(code) << " exit=" << status
              << " stage=" << (stage.empty() ? "-" : stage) << " message=" << one_line(message) << "\n";
    return status;
}

template <typename F>
auto with_flag(const std::string& flag, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const ParameterError& e) {
        throw ParameterError(flag + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text)
{
    io::write_bytes(path, std::vector<unsigned char>(text.begin(), text.end()));
}

std::string csv_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int run_simulate(const std::string& config_path, const std::string& out, const std::string& truth_path)
{
    const auto doc = with_flag("--config", [&] { return io::read_json(config_path); });
    const auto input = io::simulation_input_from_json(doc);
    const auto sim = simulate_raw(input.config, input.scene);
    io::write_matrix(sim.raw, out, 0);
    if (!truth_path.empty()) {
        io::write_json(io::to_json(sim.truth), truth_path);
    }
    return 0;
}

int run_estimate(const std::string& in, const std::string& out, std::size_t k, double gate,
                 const std::string& spectrum_path)
{
    const auto bytes = with_flag("--in", [&] { return io::read_bytes(in); });
    const auto raw = io::decode_bsar(bytes).matrix;
    EstimateOptions opts;
    opts.k = k;
    opts.dominance_gate = gate;

    std::uint64_t hash = io::fnv1a(bytes.data(), bytes.size());
    const double k_value = static_cast<double>(k);
    hash = io::fnv1a(&k_value, sizeof k_value, hash);
    hash = io::fnv1a(&gate, sizeof gate, hash);

    TruncatedSvd svd;
    BlindEstimate est;
    try {
        est = estimate_blind(raw, opts, &svd);
    } catch (const UnsuitableSceneError&) {
        if (!spectrum_path.empty() && !svd.singular_values.empty()) {
            std::string text = "index,singular_value\n";
            for (std::size_t i = 0; i < svd.singular_values.size(); ++i) {
                text += std::to_string(i) + "," + csv_number(svd.singular_values[i]) + "\n";
            }
            write_text(spectrum_path, text);
        }
        throw;
    }
    if (!spectrum_path.empty()) {
        std::string text = "index,singular_value\n";
        for (std::size_t i = 0; i < est.singular_values.size(); ++i) {
            text += std::to_string(i) + "," + csv_number(est.singular_values[i]) + "\n";
        }
        write_text(spectrum_path, text);
    }
    io::write_json(io::to_json(est, hash), out);
    return 0;
}

int run_focus(const std::string& in, const std::string& est_path, const std::string& oracle_path,
              const std::string& out, const std::string& dump_dir, double taper)
{
    if (est_path.empty() == oracle_path.empty()) {
        throw ParameterError("focus needs exactly one of --est or --oracle");
    }
    const auto raw = with_flag("--in", [&] { return io::read_matrix(in); });
    FocusOptions opts;
    opts.taper_fraction = taper;
    StageDumps dumps;
    StageDumps* dp = dump_dir.empty() ? nullptr : &dumps;

    FocusedImage img;
    if (!est_path.empty()) {
        const auto doc = with_flag("--est", [&] { return io::read_json(est_path); });
        img = focus_pipeline(raw, io::estimate_from_json(doc), opts, dp);
    } else {
        const auto doc = with_flag("--oracle", [&] { return io::read_json(oracle_path); });
        img = focus_oracle(raw, io::truth_from_json(doc), opts, dp);
    }
    io::write_matrix(img.image, out, io::flag_focused);

    if (dp != nullptr) {
        std::filesystem::create_directories(dump_dir);
        const std::filesystem::path dir(dump_dir);
        io::write_matrix(dumps.range_compressed, (dir / "range_compress.bsar").string(), 0);
        io::write_matrix(dumps.range_doppler, (dir / "rcmc.bsar").string(), 0);
        io::write_matrix(img.image, (dir / "azimuth_compress.bsar").string(), io::flag_focused);
        json meta;
        meta["provenance"] = to_string(img.provenance);
        meta["estimate_hash"] = img.estimate_hash;
        meta["single_azimuth_reference"] = img.single_azimuth_reference;
        meta["rcm"] = io::to_json(dumps.rcm);
        io::write_json(meta, (dir / "track_rcm.json").string());
    }
    return 0;
}

int run_analyze(const std::string& in, double row, double col, const std::string& out, std::size_t window,
                std::size_t oversample)
{
    const auto img = with_flag("--in", [&] { return io::read_matrix(in); });
    const auto r = analyze_point_target(img, row, col, window, oversample);
    std::string text =
        "peak_row,peak_col,peak_magnitude,irw_range,irw_azimuth,pslr_range,pslr_azimuth,islr_range,islr_azimuth,"
        "oversample_factor\n";
    for (double v : {r.peak_row, r.peak_col, r.peak_magnitude, r.irw_range, r.irw_azimuth, r.pslr_range,
                     r.pslr_azimuth, r.islr_range, r.islr_azimuth}) {
        text += csv_number(v) + ",";
    }
    text += std::to_string(r.oversample_factor) + "\n";
    write_text(out, text);
    return 0;
}

int run_compare(const std::string& a_path, const std::string& b_path, const std::string& out,
                std::optional<double> row, std::optional<double> col, std::size_t window)
{
    const auto a = with_flag("--a", [&] { return io::read_matrix(a_path); });
    const auto b = with_flag("--b", [&] { return io::read_matrix(b_path); });
    std::optional<Region> region;
    if (row.has_value() != col.has_value()) {
        throw ParameterError("--row and --col must be given together");
    }
    if (row) {
        region = centered_region(a.rows(), a.cols(), *row, *col, window);
    }
    io::write_json(io::to_json(compare_images(a, b, region)), out);
    return 0;
}

int run_render(const std::string& in, double db, const std::string& out)
{
    const auto m = with_flag("--in", [&] { return io::read_matrix(in); });
    if (!io::render_magnitude(m, db, out)) {
        std::cerr << "bsar: warning: input is all zero; wrote a black image\n";
    }
    return 0;
}

json moments_json(const Moments& m)
{
    return json{{"mean", m.mean}, {"variance", m.variance}, {"skewness", m.skewness},
                {"excess_kurtosis", m.excess_kurtosis}};
}

json histogram_json(const Histogram& h)
{
    return json{{"lower", h.lower}, {"upper", h.upper}, {"counts", h.counts}};
}

int run_stats(const std::string& in, const std::string& out)
{
    const auto m = with_flag("--in", [&] { return io::read_matrix(in); });
    const auto st = raw_statistics(m);
    json j;
    j["real"] = moments_json(st.real);
    j["imag"] = moments_json(st.imag);
    j["real_histogram"] = histogram_json(st.real_histogram);
    j["imag_histogram"] = histogram_json(st.imag_histogram);
    io::write_json(j, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Blind SAR focusing toolkit", "bsar"};
    app.require_subcommand(1);
    app.set_version_flag("--version", bsar::tool_version);

    std::string config, in, out, truth, est, oracle, dump_dir, spectrum, a_path, b_path;
    std::size_t k = 10;
    double gate = 3.0;
    double taper = 0.1;
    double db = -40.0;
    double row = 0.0;
    double col = 0.0;
    std::optional<double> cmp_row, cmp_col;
    std::size_t window = 64;
    std::size_t oversample = 16;

    auto* sim = app.add_subcommand("simulate", "Simulate raw echoes from a config and scene");
    sim->add_option("--config", config, "Config + scene JSON")->required();
    sim->add_option("--out", out, "Raw BSAR output")->required();
    sim->add_option("--truth", truth, "Ground-truth JSON output");

    auto* estc = app.add_subcommand("estimate", "Blind parameter estimation");
    estc->add_option("--in", in, "Raw BSAR input")->required();
    estc->add_option("--out", out, "Estimate JSON output")->required();
    estc->add_option("--k", k, "Singular triplets to compute")->capture_default_str();
    estc->add_option("--gate", gate, "Minimum sigma1/sigma2")->capture_default_str();
    estc->add_option("--spectrum", spectrum, "Singular value CSV output");

    auto* foc = app.add_subcommand("focus", "Range-Doppler focusing");
    foc->add_option("--in", in, "Raw BSAR input")->required();
    auto* est_opt = foc->add_option("--est", est, "Blind estimate JSON");
    auto* oracle_opt = foc->add_option("--oracle", oracle, "Ground-truth JSON (oracle focusing)");
    est_opt->excludes(oracle_opt);
    foc->add_option("--out", out, "Focused BSAR output")->required();
    foc->add_option("--dump-stages", dump_dir, "Directory for intermediate products");
    foc->add_option("--taper", taper, "Reference taper fraction")->capture_default_str();

    auto* ana = app.add_subcommand("analyze", "Point-target impulse-response metrics");
    ana->add_option("--in", in, "Focused BSAR input")->required();
    ana->add_option("--row", row, "Approximate target row")->required();
    ana->add_option("--col", col, "Approximate target column")->required();
    ana->add_option("--out", out, "CSV report output")->required();
    ana->add_option("--window", window, "Analysis window")->capture_default_str();
    ana->add_option("--oversample", oversample, "Oversampling factor")->capture_default_str();

    auto* cmp = app.add_subcommand("compare", "Compare two focused images");
    cmp->add_option("--a", a_path, "First image")->required();
    cmp->add_option("--b", b_path, "Second image")->required();
    cmp->add_option("--out", out, "JSON summary output")->required();
    cmp->add_option("--row", cmp_row, "Region centre row");
    cmp->add_option("--col", cmp_col, "Region centre column");
    cmp->add_option("--window", window, "Region size")->capture_default_str();

    auto* ren = app.add_subcommand("render", "Render magnitude as 8-bit PGM");
    ren->add_option("--in", in, "BSAR input")->required();
    ren->add_option("--db", db, "Display floor in dB (negative)")->capture_default_str();
    ren->add_option("--out", out, "PGM output")->required();

    auto* sta = app.add_subcommand("stats", "Raw I/Q moments and histograms");
    sta->add_option("--in", in, "BSAR input")->required();
    sta->add_option("--out", out, "JSON output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report(bsar::ErrorCode::parameter, "", e.what());
    }

    try {
        if (*sim) {
            return run_simulate(config, out, truth);
        }
        if (*estc) {
            return run_estimate(in, out, k, gate, spectrum);
        }
        if (*foc) {
            return run_focus(in, est, oracle, out, dump_dir, taper);
        }
        if (*ana) {
            return run_analyze(in, row, col, out, window, oversample);
        }
        if (*cmp) {
            return run_compare(a_path, b_path, out, cmp_row, cmp_col, window);
        }
        if (*ren) {
            return run_render(in, db, out);
        }
        if (*sta) {
            return run_stats(in, out);
        }
    } catch (const bsar::Error& e) {
        return report(e.code(), e.stage(), e.what());
    } catch (const std::exception& e) {
        return report(bsar::ErrorCode::parameter, "", e.what());
    }
    return 0;
}
