// SPDX-License-Identifier: Apache-2.0
//
// arraydist - spatial distribution of nonlinear distortion from antenna arrays
// Copyright (C) 2026 arraydist authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "arraydist/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace arraydist
{

using nlohmann::ordered_json;

std::string format_number(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string &field)
{
    if (field.find_first_of(",\"\r\n") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

void CsvWriter::row(const std::vector<std::string> &fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i)
    {
        if (i)
            out_ << ',';
        out_ << csv_escape(fields[i]);
    }
    out_ << '\n';
}

ordered_json json_number(double x)
{
    if (!std::isfinite(x))
        return nullptr;
    return x;
}

namespace
{
std::string db(double v)
{
    return format_number(v > 0.0 ? 10.0 * std::log10(v) : kDbFloor);
}

ordered_json numbers(const std::vector<double> &v)
{
    auto a = ordered_json::array();
    for (double x : v)
        a.push_back(json_number(x));
    return a;
}

std::string file_hash(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(ss.str())));
    return buf;
}
} // namespace

void write_spectra_csv(std::ostream &out, const Setup &st, const DistortionDecomposition &D, const std::string &hash)
{
    CsvWriter w(out);
    w.row({"scenario_hash", "f_hz", "f_over_b", "series", "psd", "psd_db"});
    const double M = static_cast<double>(D.antennas());
    const double B = st.B();
    std::vector<std::pair<std::string, ScalarSpectrum>> series = {{"input", D.Sxx.trace()},
                                                                  {"linear", D.Suu.trace()},
                                                                  {"distortion", D.Sdd.trace()},
                                                                  {"total", D.Syy.trace()}};
    for (std::size_t j = 0; j < D.orders.size(); ++j)
        series.emplace_back("order" + std::to_string(D.orders[j]), D.order_terms[j].trace());
    const auto &g = D.grid();
    for (const auto &[name, s] : series)
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            const double v = s.values[i] / M;
            w.row({hash, format_number(g.at(i)), format_number(g.at(i) / B), name, format_number(v), db(v)});
        }
}

void write_pattern_csv(std::ostream &out, const Setup &st, const std::vector<RadiationPattern> &pats,
                       const std::string &hash)
{
    CsvWriter w(out);
    w.row({"scenario_hash", "f_hz", "f_over_b", "angle_deg", "series", "value", "value_db"});
    const double B = st.B();
    for (const auto &p : pats)
    {
        std::vector<std::pair<std::string, const std::vector<double> *>> series = {
            {"linear", &p.linear}, {"distortion", &p.distortion}, {"total", &p.total}};
        for (std::size_t j = 0; j < p.orders.size(); ++j)
            series.emplace_back("order" + std::to_string(p.orders[j]), &p.per_order[j]);
        for (const auto &[name, v] : series)
            for (std::size_t i = 0; i < p.angles_deg.size(); ++i)
                w.row({hash, format_number(p.f), format_number(p.f / B), format_number(p.angles_deg[i]), name,
                       format_number((*v)[i]), db((*v)[i])});
    }
}

void write_eigen_csv(std::ostream &out, const Setup &st, const std::vector<EigenResult> &eig, const std::string &hash)
{
    CsvWriter w(out);
    w.row({"scenario_hash", "f_hz", "f_over_b", "component", "index", "eigenvalue", "relative_db"});
    const double B = st.B();
    for (const auto &e : eig)
        for (const auto &[name, v] : {std::pair{std::string("distortion"), &e.values}, std::pair{std::string("order3"), &e.values3}})
        {
            const double top = v->empty() ? 0.0 : (*v)[0];
            for (std::size_t i = 0; i < v->size(); ++i)
                w.row({hash, format_number(e.f), format_number(e.f / B), name, std::to_string(i),
                       format_number((*v)[i]), db(top > 0.0 ? std::max(0.0, (*v)[i]) / top : 0.0)});
        }
}

void write_ccdf_csv(std::ostream &out, const CcdfTable &t, const std::string &hash)
{
    CsvWriter w(out);
    w.row({"scenario_hash", "normalized_distortion", "normalized_distortion_db", "ccdf"});
    for (std::size_t i = 0; i < t.value.size(); ++i)
        w.row({hash, format_number(t.value[i]), db(t.value[i]), format_number(t.ccdf[i])});
}

ordered_json metrics_json(const Setup &st, const RunMetrics &m, const std::string &hash)
{
    ordered_json j;
    j["scenario_hash"] = hash;
    j["bandwidth_hz"] = st.B();
    j["antennas"] = st.geometry.size();
    j["users"] = st.channel.users();
    j["user_angles_deg"] = numbers(st.scenario.channel.angles_deg);
    j["drive_power"] = st.drive;
    j["aclr_db"] = json_number(m.aclr_db);
    j["user_aclr_db"] = numbers(m.user_aclr_db);
    j["array_aclr_db"] = json_number(m.array_aclr_db);
    j["array_aclr_angle_deg"] = m.array_aclr_angle_deg;
    auto g = ordered_json::array();
    for (std::size_t i = 0; i < m.gmax_db.size(); ++i)
        g.push_back({{"f_over_b", m.gmax_f_over_b[i]}, {"g_max_dbi", json_number(m.gmax_db[i])}});
    j["g_max"] = g;
    j["max_power_ratio_db"] = m.max_power_ratio_db;
    const auto &d = m.directions;
    j["directions"] = {{"f_over_b", d.f / st.B()},
                       {"channel_taps", d.L},
                       {"significant_users", d.prediction.significant_users},
                       {"predicted", d.prediction.count},
                       {"predicted_capped", d.prediction.capped},
                       {"omnidirectional", d.prediction.omnidirectional},
                       {"formula_in_range", d.prediction.formula_in_range},
                       {"numerical_rank_order3", d.numerical_rank}};
    const auto [lo, hi] = std::minmax_element(m.input_power.begin(), m.input_power.end());
    j["input_power"] = {{"mean", std::accumulate(m.input_power.begin(), m.input_power.end(), 0.0) /
                                     static_cast<double>(m.input_power.size())},
                        {"min", *lo},
                        {"max", *hi}};
    auto orders = ordered_json::object();
    for (std::size_t i = 0; i < m.order_power.size(); ++i)
        orders["order" + std::to_string(3 + 2 * i)] = m.order_power[i];
    j["distortion_power_per_antenna"] = orders;
    j["psd_floor"] = m.psd_floor;
    return j;
}

ordered_json validation_json(const Setup &st, const ValidationReport &r, const std::string &hash)
{
    ordered_json j;
    j["scenario_hash"] = hash;
    j["pass"] = r.pass;
    j["tolerance_db"] = r.tolerance_db;
    j["max_dev_db"] = json_number(r.max_dev_db);
    auto comps = ordered_json::array();
    for (const auto &c : r.components)
        comps.push_back({{"component", c.component},
                         {"max_dev_db", json_number(c.max_dev_db)},
                         {"at_f_over_b", c.at_f / st.B()},
                         {"groups", c.groups}});
    j["components"] = comps;
    j["bussgang_correlation"] = r.bussgang_correlation;
    j["additivity_error"] = r.additivity_error;
    j["residual_power"] = r.residual_power;
    j["synthesis"] = synthesis_name(st.tx.synthesis);
    j["samples"] = r.samples;
    j["segments"] = r.segments;
    j["osf"] = r.osf;
    j["fs_hz"] = r.fs;
    return j;
}

ordered_json two_tone_json(const Setup &st, const TwoToneResult &r, const std::string &hash)
{
    ordered_json j;
    j["scenario_hash"] = hash;
    j["subcarriers"] = {r.nu1, r.nu2};
    j["user_angles_deg"] = {r.theta1_deg, r.theta2_deg};
    j["subcarrier_spacing_hz"] = st.pulses.f0;
    auto lines = ordered_json::array();
    for (const auto &l : r.lines)
        lines.push_back({{"subcarrier", l.subcarrier},
                         {"f_hz", l.f},
                         {"weight", l.weight},
                         {"intermodulation", l.intermodulation},
                         {"predicted_deg", json_number(l.predicted_deg)},
                         {"peak_deg", l.peak_deg},
                         {"error_deg", json_number(l.error_deg)}});
    j["lines"] = lines;
    return j;
}

ordered_json provenance_json(const Setup &st, const std::string &hash, const std::string &command)
{
    const auto &s = st.scenario;
    ordered_json j;
    j["tool"] = "arraydist";
    j["tool_version"] = ARRAYDIST_VERSION;
    j["command"] = command;
    j["schema_version"] = s.schema_version;
    j["scenario_name"] = s.name;
    j["scenario_hash"] = hash;
    j["seed"] = s.seed;
    j["amplifier"] = {{"file", s.amplifier.file},
                      {"name", st.pa.name},
                      {"version", st.pa.version},
                      {"file_hash", file_hash(s.amplifier.resolved_path)},
                      {"max_order", st.pa.max_order()}};
    j["grid"] = {{"order", st.order}, {"points_per_b", s.grid.points_per_b}, {"points", st.grid.size()}};
    j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                         std::to_string(EIGEN_MINOR_VERSION);
    return j;
}

} // namespace arraydist
