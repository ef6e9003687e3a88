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


#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "bsar/io/bsar_file.hpp"
#include "bsar/io/json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& work_dir()
{
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("bsar_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string p(const std::string& name) { return (work_dir() / name).string(); }

int run(const std::string& args, const std::string& stderr_file = "")
{
    std::string cmd = std::string("\"") + BSAR_CLI_PATH + "\" " + args;
    cmd += " 2> \"" + (stderr_file.empty() ? p("stderr.txt") : stderr_file) + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string config(const std::string& name) { return std::string(BSAR_CONFIG_DIR) + "/" + name; }

std::map<std::string, double> read_report(const std::string& path)
{
    std::ifstream in(path);
    std::string header;
    std::string values;
    std::getline(in, header);
    std::getline(in, values);
    std::map<std::string, double> out;
    std::stringstream hs(header);
    std::stringstream vs(values);
    std::string key;
    std::string value;
    while (std::getline(hs, key, ',') && std::getline(vs, value, ',')) {
        out[key] = std::stod(value);
    }
    return out;
}

// simulate -> estimate -> focus once for the whole suite.
struct Pipeline {
    int simulate = -1;
    int estimate = -1;
    int focus = -1;
};

const Pipeline& pipeline()
{
    static const Pipeline pl = [] {
        Pipeline x;
        x.simulate = run("simulate --config \"" + config("default.json") + "\" --out " + p("raw.bsar") +
                         " --truth " + p("truth.json"));
        x.estimate = run("estimate --in " + p("raw.bsar") + " --out " + p("est.json") + " --spectrum " + p("sv.csv"));
        x.focus = run("focus --in " + p("raw.bsar") + " --est " + p("est.json") + " --out " + p("slc.bsar") +
                      " --dump-stages " + p("stages"));
        return x;
    }();
    return pl;
}

}  // namespace

TEST(Cli, EndToEndDefaultConfig)
{
    const auto& pl = pipeline();
    ASSERT_EQ(pl.simulate, 0);
    ASSERT_EQ(pl.estimate, 0);
    ASSERT_EQ(pl.focus, 0);

    const auto truth = bsar::io::read_json(p("truth.json"));
    const auto est = bsar::io::read_json(p("est.json"));
    const auto& t = truth["scatterers"][0];
    const double kr = truth["range_rate"].get<double>();
    EXPECT_LT(std::abs(est["range_chirp"]["rate"].get<double>() - kr) / kr, 0.01);
    const double ka = t["azimuth_rate"].get<double>();
    EXPECT_LT(std::abs(est["azimuth_chirp"]["rate"].get<double>() - ka) / std::abs(ka), 0.02);
    EXPECT_LT(std::abs(est["doppler_centroid"].get<double>() - t["doppler_centroid"].get<double>()), 0.01);

    const double row = t["focused_row"].get<double>();
    const double col = t["focused_col"].get<double>();
    ASSERT_EQ(run("analyze --in " + p("slc.bsar") + " --row " + std::to_string(row) + " --col " +
                  std::to_string(col) + " --out " + p("report.csv")),
              0);
    const auto rep = read_report(p("report.csv"));
    EXPECT_LE(std::abs(rep.at("peak_row") - row), 1.0);
    EXPECT_LE(std::abs(rep.at("peak_col") - col), 1.0);
    EXPECT_EQ(rep.at("oversample_factor"), 16.0);

    EXPECT_TRUE(fs::exists(p("stages/range_compress.bsar")));
    EXPECT_TRUE(fs::exists(p("stages/rcmc.bsar")));
    EXPECT_TRUE(fs::exists(p("stages/track_rcm.json")));
    EXPECT_EQ(slurp(p("sv.csv")).rfind("index,singular_value\n", 0), 0u);
}

TEST(Cli, OracleFocusAndCompare)
{
    ASSERT_EQ(pipeline().focus, 0);
    ASSERT_EQ(run("focus --in " + p("raw.bsar") + " --oracle " + p("truth.json") + " --out " + p("oracle.bsar")), 0);
    const auto truth = bsar::io::read_json(p("truth.json"));
    const auto& t = truth["scatterers"][0];
    ASSERT_EQ(run("compare --a " + p("slc.bsar") + " --b " + p("oracle.bsar") + " --out " + p("cmp.json") +
                  " --row " + std::to_string(t["focused_row"].get<double>()) + " --col " +
                  std::to_string(t["focused_col"].get<double>())),
              0);
    const auto cmp = bsar::io::read_json(p("cmp.json"));
    EXPECT_GE(cmp["correlation"].get<double>(), 0.98);
}

TEST(Cli, RefocusIsByteIdentical)
{
    ASSERT_EQ(pipeline().focus, 0);
    ASSERT_EQ(run("focus --in " + p("raw.bsar") + " --est " + p("est.json") + " --out " + p("slc2.bsar")), 0);
    EXPECT_EQ(slurp(p("slc.bsar")), slurp(p("slc2.bsar")));
    ASSERT_EQ(run("estimate --in " + p("raw.bsar") + " --out " + p("est2.json")), 0);
    ASSERT_EQ(run("simulate --config \"" + config("default.json") + "\" --out " + p("raw2.bsar")), 0);
    EXPECT_EQ(slurp(p("raw.bsar")), slurp(p("raw2.bsar")));
}

TEST(Cli, NoiseOnlyIsUnsuitable)
{
    ASSERT_EQ(run("simulate --config \"" + config("noise_only.json") + "\" --out " + p("noise.bsar")), 0);
    EXPECT_EQ(run("estimate --in " + p("noise.bsar") + " --out " + p("noise_est.json"), p("noise_err.txt")), 4);
    const auto err = slurp(p("noise_err.txt"));
    EXPECT_NE(err.find("code=unsuitable_scene"), std::string::npos);
    EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);
}

TEST(Cli, MissingEstimateNamesFlag)
{
    ASSERT_EQ(pipeline().simulate, 0);
    EXPECT_EQ(run("focus --in " + p("raw.bsar") + " --est " + p("does_not_exist.json") + " --out " + p("x.bsar"),
                  p("missing_err.txt")),
              2);
    EXPECT_NE(slurp(p("missing_err.txt")).find("--est"), std::string::npos);
}

TEST(Cli, FormatAndParameterErrors)
{
    {
        std::ofstream bad(p("bad.bsar"), std::ios::binary);
        bad << "XSAR and some more bytes to pass the header size check";
    }
    EXPECT_EQ(run("render --in " + p("bad.bsar") + " --out " + p("bad.pgm"), p("bad_err.txt")), 3);
    EXPECT_NE(slurp(p("bad_err.txt")).find("code=format"), std::string::npos);
    EXPECT_EQ(run("estimate --in " + p("raw.bsar")), 2);
    EXPECT_EQ(run("bogus"), 2);
    EXPECT_EQ(run("render --in " + p("raw.bsar") + " --db 5 --out " + p("x.pgm")), 2);
}

TEST(Cli, RenderAndStats)
{
    ASSERT_EQ(pipeline().focus, 0);
    ASSERT_EQ(run("render --in " + p("slc.bsar") + " --db -40 --out " + p("slc.pgm")), 0);
    const auto pgm = slurp(p("slc.pgm"));
    EXPECT_EQ(pgm.rfind("P5\n1024 512\n255\n", 0), 0u);
    EXPECT_EQ(pgm.size(), std::string("P5\n1024 512\n255\n").size() + 512u * 1024u);
    ASSERT_EQ(run("stats --in " + p("raw.bsar") + " --out " + p("stats.json")), 0);
    const auto st = bsar::io::read_json(p("stats.json"));
    EXPECT_EQ(st["real_histogram"]["counts"].size(), 64u);
}
