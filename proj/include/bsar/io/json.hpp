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

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsar/error.hpp"
#include "bsar/estimate.hpp"
#include "bsar/focus.hpp"
#include "bsar/io/bsar_file.hpp"
#include "bsar/quality.hpp"
#include "bsar/simulate.hpp"
#include "bsar/version.hpp"

namespace bsar::io {

using json = nlohmann::ordered_json;

inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL)
{
    const auto* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline json parse_json_text(const std::string& text, const std::string& what)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(what + ": " + e.what(), e.byte);
    }
}

inline json read_json(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParameterError("cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

inline void write_json(const json& j, const std::string& path)
{
    const std::string text = j.dump(2) + "\n";
    write_bytes(path, std::vector<unsigned char>(text.begin(), text.end()));
}

namespace detail {

template <typename T>
T field(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key)) {
        throw FormatError(where + ": missing field \"" + key + "\"", 0);
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(where + ": field \"" + key + "\": " + e.what(), 0);
    }
}

inline json complex_to_json(cdouble z) { return json::array({z.real(), z.imag()}); }

inline cdouble complex_from_json(const json& j, const std::string& where)
{
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw FormatError(where + ": complex value must be [re, im]", 0);
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

// ---- acquisition config and scene ---------------------------------------

inline json to_json(const AcquisitionConfig& c)
{
    return json{{"wavelength", c.wavelength},
                {"platform_speed", c.platform_speed},
                {"closest_range", c.closest_range},
                {"prf", c.prf},
                {"range_sampling_rate", c.range_sampling_rate},
                {"chirp_rate", c.chirp_rate},
                {"chirp_duration", c.chirp_duration},
                {"beam_azimuth_extent", c.beam_azimuth_extent},
                {"squint_offset", c.squint_offset},
                {"num_pulses", c.num_pulses},
                {"samples_per_pulse", c.samples_per_pulse},
                {"noise_sigma", c.noise_sigma},
                {"rng_seed", c.rng_seed}};
}

/// Missing fields keep their defaults; unknown fields are rejected so a
/// misspelt key cannot silently fall back to a default.
inline AcquisitionConfig config_from_json(const json& j)
{
    if (!j.is_object()) {
        throw ConfigurationError("acquisition config must be a JSON object");
    }
    AcquisitionConfig c;
    static const std::set<std::string> known = {
        "wavelength", "platform_speed", "closest_range", "prf", "range_sampling_rate", "chirp_rate",
        "chirp_duration", "beam_azimuth_extent", "squint_offset", "num_pulses", "samples_per_pulse",
        "noise_sigma", "rng_seed", "scene"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw ConfigurationError("unknown config field \"" + key + "\"");
        }
    }
    auto num = [&](const char* key, double& out) {
        if (j.contains(key)) {
            if (!j[key].is_number()) {
                throw ConfigurationError(std::string("config field \"") + key + "\" must be a number");
            }
            out = j[key].get<double>();
        }
    };
    auto count = [&](const char* key, auto& out) {
        if (j.contains(key)) {
            if (!j[key].is_number_unsigned()) {
                throw ConfigurationError(std::string("config field \"") + key + "\" must be a non-negative integer");
            }
            out = j[key].get<std::remove_reference_t<decltype(out)>>();
        }
    };
    num("wavelength", c.wavelength);
    num("platform_speed", c.platform_speed);
    num("closest_range", c.closest_range);
    num("prf", c.prf);
    num("range_sampling_rate", c.range_sampling_rate);
    num("chirp_rate", c.chirp_rate);
    num("chirp_duration", c.chirp_duration);
    num("beam_azimuth_extent", c.beam_azimuth_extent);
    num("squint_offset", c.squint_offset);
    num("noise_sigma", c.noise_sigma);
    count("num_pulses", c.num_pulses);
    count("samples_per_pulse", c.samples_per_pulse);
    count("rng_seed", c.rng_seed);
    c.validate();
    return c;
}

inline json to_json(const Scatterer& s)
{
    return json{{"azimuth_time", s.azimuth_time},
                {"range_offset", s.range_offset},
                {"reflectivity", detail::complex_to_json(s.reflectivity)}};
}

inline std::vector<Scatterer> scene_from_json(const json& j)
{
    if (!j.is_array()) {
        throw ConfigurationError("\"scene\" must be an array of scatterers");
    }
    std::vector<Scatterer> scene;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        const std::string where = "scene[" + std::to_string(i) + "]";
        Scatterer s;
        s.azimuth_time = detail::field<double>(e, "azimuth_time", where);
        s.range_offset = e.value("range_offset", 0.0);
        if (e.contains("reflectivity")) {
            s.reflectivity = detail::complex_from_json(e["reflectivity"], where);
        }
        scene.push_back(s);
    }
    return scene;
}

struct SimulationInput {
    AcquisitionConfig config;
    std::vector<Scatterer> scene;
};

inline SimulationInput simulation_input_from_json(const json& j)
{
    SimulationInput in;
    in.config = config_from_json(j);
    if (!j.contains("scene")) {
        throw ConfigurationError("config has no \"scene\" array");
    }
    in.scene = scene_from_json(j["scene"]);
    return in;
}

inline json to_json(const SimulationInput& in)
{
    json j = to_json(in.config);
    j["scene"] = json::array();
    for (const auto& s : in.scene) {
        j["scene"].push_back(to_json(s));
    }
    return j;
}

// ---- ground truth -----------------------------------------------------------

inline json to_json(const GroundTruth& t)
{
    json j;
    j["tool_version"] = tool_version;
    j["config"] = to_json(SimulationInput{t.config, t.scene});
    j["range_rate"] = t.range_rate;
    j["bandwidth_fraction"] = t.bandwidth_fraction;
    j["chirp_length"] = t.chirp_length;
    j["scatterers"] = json::array();
    for (const auto& s : t.scatterers) {
        j["scatterers"].push_back(json{{"focused_row", s.focused_row},
                                       {"focused_col", s.focused_col},
                                       {"closest_approach_col", s.closest_approach_col},
                                       {"beam_center_row", s.beam_center_row},
                                       {"azimuth_rate", s.azimuth_rate},
                                       {"doppler_centroid", s.doppler_centroid},
                                       {"rcm", s.rcm}});
    }
    return j;
}

/// Truth is recomputed from the embedded config and scene; the stored
/// derived values are informative only.
inline GroundTruth truth_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("config")) {
        throw FormatError("ground truth document has no \"config\" object", 0);
    }
    const auto in = simulation_input_from_json(j["config"]);
    return ground_truth(in.config, in.scene);
}

// ---- blind estimate ---------------------------------------------------------

inline json to_json(const ChirpModel& m)
{
    return json{{"rate", m.rate},
                {"center", m.center},
                {"support", json::array({m.support.start, m.support.stop})},
                {"taper_fraction", m.taper_fraction},
                {"linear", m.linear},
                {"constant", m.constant}};
}

inline ChirpModel chirp_from_json(const json& j, const std::string& where)
{
    ChirpModel m;
    m.rate = detail::field<double>(j, "rate", where);
    m.center = detail::field<double>(j, "center", where);
    const auto support = detail::field<std::vector<std::size_t>>(j, "support", where);
    if (support.size() != 2) {
        throw FormatError(where + ": support must be [start, stop]", 0);
    }
    m.support = {support[0], support[1]};
    m.taper_fraction = detail::field<double>(j, "taper_fraction", where);
    m.linear = detail::field<double>(j, "linear", where);
    m.constant = detail::field<double>(j, "constant", where);
    try {
        m.validate();
    } catch (const ParameterError& e) {
        throw FormatError(where + ": " + e.what(), 0);
    }
    return m;
}

inline json to_json(const BlindEstimate& e, std::uint64_t config_hash)
{
    json j;
    j["tool_version"] = tool_version;
    j["config_hash"] = hex64(config_hash);
    j["range_chirp"] = to_json(e.range_chirp);
    j["azimuth_chirp"] = to_json(e.azimuth_chirp);
    j["doppler_centroid"] = e.doppler_centroid;
    j["beam_peak_index"] = e.beam_peak_index;
    j["dominance_ratio"] = e.dominance_ratio;
    j["range_fit_rms"] = e.range_fit_rms;
    j["azimuth_fit_rms"] = e.azimuth_fit_rms;
    j["singular_values"] = e.singular_values;
    j["beam_envelope"] = e.beam_envelope;
    return j;
}

inline BlindEstimate estimate_from_json(const json& j)
{
    const std::string where = "estimate";
    if (!j.is_object()) {
        throw FormatError("estimate document must be a JSON object", 0);
    }
    BlindEstimate e;
    e.range_chirp = chirp_from_json(detail::field<json>(j, "range_chirp", where), "range_chirp");
    e.azimuth_chirp = chirp_from_json(detail::field<json>(j, "azimuth_chirp", where), "azimuth_chirp");
    e.doppler_centroid = detail::field<double>(j, "doppler_centroid", where);
    e.beam_peak_index = detail::field<double>(j, "beam_peak_index", where);
    e.dominance_ratio = detail::field<double>(j, "dominance_ratio", where);
    e.range_fit_rms = detail::field<double>(j, "range_fit_rms", where);
    e.azimuth_fit_rms = detail::field<double>(j, "azimuth_fit_rms", where);
    e.singular_values = detail::field<std::vector<double>>(j, "singular_values", where);
    e.beam_envelope = detail::field<std::vector<double>>(j, "beam_envelope", where);
    return e;
}

// ---- quality reports --------------------------------------------------------

inline json to_json(const PointTargetReport& r)
{
    return json{{"peak_row", r.peak_row},         {"peak_col", r.peak_col},
                {"peak_magnitude", r.peak_magnitude}, {"irw_range", r.irw_range},
                {"irw_azimuth", r.irw_azimuth},   {"pslr_range", r.pslr_range},
                {"pslr_azimuth", r.pslr_azimuth}, {"islr_range", r.islr_range},
                {"islr_azimuth", r.islr_azimuth}, {"oversample_factor", r.oversample_factor}};
}

inline json to_json(const ImageComparison& c)
{
    return json{{"correlation", c.correlation},
                {"row_offset", c.row_offset},
                {"col_offset", c.col_offset},
                {"db_rms_difference", c.db_rms_difference},
                {"region",
                 json{{"rows", json::array({c.region.rows.start, c.region.rows.stop})},
                      {"cols", json::array({c.region.cols.start, c.region.cols.stop})}}}};
}

inline json to_json(const RcmModel& m)
{
    return json{{"reference_range_bin", m.reference_range_bin},
                {"reference_pulse", m.reference_pulse},
                {"linear", m.linear},
                {"quadratic", m.quadratic},
                {"fit_rms", m.fit_rms},
                {"source", to_string(m.source)}};
}

}  // namespace bsar::io
