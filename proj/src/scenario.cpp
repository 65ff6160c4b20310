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

#include "arraydist/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace arraydist
{

namespace
{
namespace fs = std::filesystem;

// Typed access to one YAML mapping that rejects unknown keys
class Section
{
  public:
    Section(const YAML::Node &node, std::string path) : node_(node), path_(std::move(path))
    {
        if (node_ && !node_.IsNull() && !node_.IsMap())
            throw ScenarioError(path_.empty() ? "<root>" : path_, "expected a mapping");
    }

    bool has(const std::string &key)
    {
        seen_.insert(key);
        return node_ && node_.IsMap() && node_[key] && !node_[key].IsNull();
    }

    std::string field(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

    template <class T>
    T get(const std::string &key, T fallback)
    {
        if (!has(key))
            return fallback;
        return as<T>(node_[key], field(key));
    }

    template <class T>
    T require(const std::string &key)
    {
        if (!has(key))
            throw ScenarioError(field(key), "required field missing");
        return as<T>(node_[key], field(key));
    }

    template <class T>
    std::vector<T> list(const std::string &key, std::vector<T> fallback)
    {
        if (!has(key))
            return fallback;
        const auto n = node_[key];
        if (!n.IsSequence())
            throw ScenarioError(field(key), "expected a list");
        std::vector<T> out;
        for (std::size_t i = 0; i < n.size(); ++i)
            out.push_back(as<T>(n[i], field(key) + "[" + std::to_string(i) + "]"));
        return out;
    }

    Section child(const std::string &key)
    {
        has(key);
        return Section(node_ && node_.IsMap() ? node_[key] : YAML::Node(), field(key));
    }

    YAML::Node raw(const std::string &key)
    {
        has(key);
        return node_ && node_.IsMap() ? node_[key] : YAML::Node();
    }

    void finish() const
    {
        if (!node_ || !node_.IsMap())
            return;
        for (const auto &kv : node_)
        {
            const auto k = kv.first.as<std::string>();
            if (!seen_.count(k))
                throw ScenarioError(field(k), "unknown field");
        }
    }

    template <class T>
    static T as(const YAML::Node &n, const std::string &where)
    {
        if (!n.IsScalar())
            throw ScenarioError(where, "expected a scalar value");
        try
        {
            if constexpr (std::is_same_v<T, bool>)
            {
                const auto s = n.as<std::string>();
                if (s == "true")
                    return true;
                if (s == "false")
                    return false;
                throw ScenarioError(where, "expected true or false");
            }
            else if constexpr (std::is_unsigned_v<T>)
            {
                const auto v = n.as<long long>();
                if (v < 0)
                    throw ScenarioError(where, "must be non-negative");
                return static_cast<T>(v);
            }
            else
                return n.as<T>();
        }
        catch (const YAML::Exception &)
        {
            throw ScenarioError(where, "cannot read value '" + n.Scalar() + "'");
        }
    }

  private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

void check(bool ok, const std::string &field, const std::string &reason)
{
    if (!ok)
        throw ScenarioError(field, reason);
}

std::string resolve_file(const std::string &file, const std::string &base_dir)
{
    const fs::path p(file);
    if (p.is_absolute())
        return fs::exists(p) ? p.string() : std::string();
    for (const fs::path &dir : {fs::path(base_dir), fs::path(ARRAYDIST_DATA_DIR)})
    {
        const auto c = dir / p;
        if (fs::exists(c))
            return fs::weakly_canonical(c).string();
    }
    return {};
}
} // namespace

Scenario parse_scenario(const std::string &text, const std::string &base_dir)
{
    YAML::Node root;
    try
    {
        root = YAML::Load(text);
    }
    catch (const YAML::Exception &e)
    {
        throw ScenarioError("<file>", std::string("YAML syntax error: ") + e.what());
    }
    if (!root || root.IsNull())
        throw ScenarioError("<root>", "empty scenario");
    Section top(root, "");
    Scenario s;

    s.schema_version = top.get<int>("schema_version", kScenarioSchemaVersion);
    check(s.schema_version == kScenarioSchemaVersion, "schema_version",
          "unsupported version " + std::to_string(s.schema_version));
    s.name = top.get<std::string>("name", s.name);
    s.description = top.get<std::string>("description", "");
    s.seed = top.get<std::uint64_t>("seed", s.seed);

    {
        auto a = top.child("array");
        s.array.antennas = a.require<std::size_t>("antennas");
        s.array.spacing_wavelengths = a.get<double>("spacing_wavelengths", s.array.spacing_wavelengths);
        s.array.carrier_hz = a.get<double>("carrier_hz", s.array.carrier_hz);
        a.finish();
        check(s.array.antennas >= 1, "array.antennas", "must be >= 1");
        check(s.array.spacing_wavelengths > 0.0, "array.spacing_wavelengths", "must be positive");
        check(s.array.carrier_hz > 0.0, "array.carrier_hz", "must be positive");
    }

    {
        if (!top.has("channel"))
            throw ScenarioError("channel", "required field missing");
        auto c = top.child("channel");
        auto &ch = s.channel;
        ch.type = c.require<std::string>("type");
        ch.angles_deg = c.list<double>("angles_deg", {});
        ch.users = c.get<std::size_t>("users", ch.angles_deg.size());
        ch.angle_low_deg = c.get<double>("angle_low_deg", ch.angle_low_deg);
        ch.angle_high_deg = c.get<double>("angle_high_deg", ch.angle_high_deg);
        ch.narrowband = c.get<bool>("narrowband", ch.narrowband);
        ch.paths = c.get<std::size_t>("paths", ch.paths);
        ch.delay_spread_symbols = c.get<double>("delay_spread_symbols", ch.delay_spread_symbols);
        c.finish();
        check(ch.type == "los" || ch.type == "multipath", "channel.type", "must be los or multipath");
        check(ch.users >= 1, "channel.users", "at least one user required");
        if (!ch.angles_deg.empty())
            check(ch.users == ch.angles_deg.size(), "channel.users", "does not match the number of angles");
        for (double a : ch.angles_deg)
            check(std::abs(a) <= 90.0, "channel.angles_deg", "angles must lie in [-90, 90]");
        check(ch.angle_low_deg >= -90.0 && ch.angle_high_deg <= 90.0 && ch.angle_low_deg < ch.angle_high_deg,
              "channel.angle_low_deg", "need -90 <= low < high <= 90");
        check(ch.paths >= 1, "channel.paths", "must be >= 1");
        check(ch.delay_spread_symbols >= 0.0, "channel.delay_spread_symbols", "must be non-negative");
        if (ch.type == "multipath")
            check(ch.angles_deg.empty(), "channel.angles_deg", "only valid for los channels");
    }

    {
        if (!top.has("waveform"))
            throw ScenarioError("waveform", "required field missing");
        auto w = top.child("waveform");
        auto &wf = s.waveform;
        wf.type = w.require<std::string>("type");
        wf.symbol_period_s = w.get<double>("symbol_period_s", wf.symbol_period_s);
        wf.rolloff = w.get<double>("rolloff", wf.rolloff);
        wf.subcarriers = w.get<int>("subcarriers", wf.type == "ofdm" ? 64 : 1);
        wf.excess_bandwidth = w.get<double>("excess_bandwidth", wf.excess_bandwidth);
        wf.lowpass = w.get<bool>("lowpass", wf.lowpass);
        const auto sched = w.raw("schedule");
        if (sched && !sched.IsNull())
        {
            check(sched.IsSequence(), "waveform.schedule", "expected a list");
            for (std::size_t i = 0; i < sched.size(); ++i)
            {
                Section e(sched[i], "waveform.schedule[" + std::to_string(i) + "]");
                ScheduleEntry entry;
                entry.subcarrier = e.require<int>("subcarrier");
                entry.users = e.list<std::size_t>("users", {});
                e.finish();
                wf.schedule.push_back(entry);
            }
        }
        w.finish();
        check(wf.type == "single_carrier" || wf.type == "ofdm", "waveform.type", "must be single_carrier or ofdm");
        check(wf.symbol_period_s > 0.0, "waveform.symbol_period_s", "must be positive");
        if (wf.type == "single_carrier")
        {
            check(wf.rolloff > 0.0 && wf.rolloff <= 1.0, "waveform.rolloff", "must be in (0, 1]");
            check(wf.subcarriers == 1, "waveform.subcarriers", "single carrier uses one subcarrier");
            check(wf.schedule.empty(), "waveform.schedule", "only valid for ofdm");
        }
        else
        {
            check(wf.subcarriers >= 1, "waveform.subcarriers", "must be >= 1");
            check(wf.excess_bandwidth >= 1.0, "waveform.excess_bandwidth", "must be >= 1");
            std::set<int> seen;
            for (const auto &e : wf.schedule)
            {
                check(e.subcarrier >= -wf.subcarriers / 2 && e.subcarrier < wf.subcarriers - wf.subcarriers / 2,
                      "waveform.schedule", "subcarrier " + std::to_string(e.subcarrier) + " outside the band");
                check(seen.insert(e.subcarrier).second, "waveform.schedule",
                      "subcarrier " + std::to_string(e.subcarrier) + " listed twice");
                for (auto k : e.users)
                    check(k < s.channel.users, "waveform.schedule", "user " + std::to_string(k) + " does not exist");
            }
        }
    }

    {
        auto p = top.child("precoder");
        s.precoder.kind = p.get<std::string>("kind", s.precoder.kind);
        s.precoder.lambda = p.get<double>("lambda", s.precoder.lambda);
        p.finish();
        check(s.precoder.kind == "MR" || s.precoder.kind == "ZF" || s.precoder.kind == "RZF", "precoder.kind",
              "must be MR, ZF or RZF");
        if (s.precoder.kind == "RZF")
            check(s.precoder.lambda > 0.0, "precoder.lambda", "RZF needs a positive regularization");
    }

    s.power = top.list<double>("power", {});
    if (!s.power.empty())
    {
        check(s.power.size() == s.channel.users, "power", "one entry per user required");
        double sum = 0.0;
        for (double x : s.power)
        {
            check(x >= 0.0, "power", "entries must be non-negative");
            sum += x;
        }
        check(sum > 0.0 && sum <= 1.0 + 1e-9, "power", "entries must sum to a value in (0, 1]");
    }

    {
        if (!top.has("amplifier"))
            throw ScenarioError("amplifier", "required field missing");
        auto a = top.child("amplifier");
        s.amplifier.file = a.require<std::string>("file");
        s.amplifier.backoff_db = a.get<double>("backoff_db", s.amplifier.backoff_db);
        a.finish();
        s.amplifier.resolved_path = resolve_file(s.amplifier.file, base_dir);
        check(!s.amplifier.resolved_path.empty(), "amplifier.file", "file '" + s.amplifier.file + "' not found");
    }

    {
        auto g = top.child("grid");
        s.grid.order = g.get<int>("order", s.grid.order);
        s.grid.points_per_b = g.get<int>("points_per_b", s.grid.points_per_b);
        g.finish();
        check(s.grid.order == 0 || (s.grid.order >= 1 && s.grid.order % 2 == 1 && s.grid.order <= kMaxSupportedOrder),
              "grid.order", "must be 0 or an odd order up to 9");
        check(s.grid.points_per_b >= 4, "grid.points_per_b", "must be >= 4");
    }

    {
        auto m = top.child("metrics");
        auto &ms = s.metrics;
        ms.pattern_f_over_b = m.list<double>("pattern_f_over_b", ms.pattern_f_over_b);
        ms.pattern_step_deg = m.get<double>("pattern_step_deg", ms.pattern_step_deg);
        ms.eigen_f_over_b = m.list<double>("eigen_f_over_b", ms.eigen_f_over_b);
        ms.eigen_rank_threshold = m.get<double>("eigen_rank_threshold", ms.eigen_rank_threshold);
        ms.ccdf_locations = m.get<std::string>("ccdf_locations", ms.ccdf_locations);
        ms.ccdf_count = m.get<std::size_t>("ccdf_count", ms.ccdf_count);
        ms.adjacent_lo_over_b = m.get<double>("adjacent_lo_over_b", ms.adjacent_lo_over_b);
        ms.adjacent_hi_over_b = m.get<double>("adjacent_hi_over_b", ms.adjacent_hi_over_b);
        m.finish();
        check(ms.pattern_step_deg > 0.0 && ms.pattern_step_deg <= 10.0, "metrics.pattern_step_deg",
              "must be in (0, 10]");
        check(ms.eigen_rank_threshold > 0.0 && ms.eigen_rank_threshold < 1.0, "metrics.eigen_rank_threshold",
              "must be in (0, 1)");
        check(ms.ccdf_locations == "los" || ms.ccdf_locations == "fading", "metrics.ccdf_locations",
              "must be los or fading");
        check(ms.ccdf_count >= 1000, "metrics.ccdf_count", "at least 1000 locations required");
        check(ms.adjacent_lo_over_b < ms.adjacent_hi_over_b, "metrics.adjacent_lo_over_b", "band is empty");
    }

    {
        auto m = top.child("mc");
        auto &mc = s.mc;
        auto &st = mc.settings;
        st.samples = m.get<std::size_t>("samples", st.samples);
        st.blocks = m.get<std::size_t>("blocks", st.blocks);
        st.osf = m.get<int>("osf", st.osf);
        st.welch.segment = m.get<std::size_t>("segment", st.welch.segment);
        st.welch.overlap = m.get<double>("overlap", st.welch.overlap);
        if (m.has("window"))
        {
            try
            {
                st.welch.window = parse_window(m.get<std::string>("window", "hann"));
            }
            catch (const InputError &e)
            {
                throw ScenarioError("mc.window", e.what());
            }
        }
        st.average_bins = m.get<std::size_t>("average_bins", st.average_bins);
        st.mask_dbc = m.get<double>("mask_dbc", st.mask_dbc);
        st.band_limit = m.get<double>("band_limit", st.band_limit);
        st.drive_mismatch_db = m.get<double>("drive_mismatch_db", st.drive_mismatch_db);
        if (m.has("synthesis"))
        {
            try
            {
                mc.synthesis = parse_synthesis(m.get<std::string>("synthesis", "stationary"));
            }
            catch (const InputError &e)
            {
                throw ScenarioError("mc.synthesis", e.what());
            }
        }
        mc.tolerance_db = m.get<double>("tolerance_db", mc.tolerance_db);
        m.finish();
        check(st.samples >= 65536, "mc.samples", "must be >= 65536");
        check(st.blocks >= 1, "mc.blocks", "must be >= 1");
        check(st.osf >= 0, "mc.osf", "must be >= 0 (0 selects twice the amplifier order)");
        try
        {
            st.welch.validate();
        }
        catch (const InputError &e)
        {
            throw ScenarioError("mc.segment", e.what());
        }
        check(st.average_bins >= 1, "mc.average_bins", "must be >= 1");
        check(st.mask_dbc < 0.0, "mc.mask_dbc", "must be negative");
        check(st.band_limit > 0.0, "mc.band_limit", "must be positive");
        check(mc.tolerance_db > 0.0, "mc.tolerance_db", "must be positive");
    }
    top.finish();
    return s;
}

Scenario load_scenario(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ScenarioError("<file>", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), fs::path(path).parent_path().string());
}

std::string canonical_yaml(const Scenario &s)
{
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    e << YAML::Key << "schema_version" << YAML::Value << s.schema_version;
    e << YAML::Key << "name" << YAML::Value << s.name;
    e << YAML::Key << "description" << YAML::Value << s.description;
    e << YAML::Key << "seed" << YAML::Value << s.seed;

    e << YAML::Key << "array" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "antennas" << YAML::Value << s.array.antennas;
    e << YAML::Key << "spacing_wavelengths" << YAML::Value << s.array.spacing_wavelengths;
    e << YAML::Key << "carrier_hz" << YAML::Value << s.array.carrier_hz;
    e << YAML::EndMap;

    const auto &c = s.channel;
    e << YAML::Key << "channel" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "type" << YAML::Value << c.type;
    e << YAML::Key << "angles_deg" << YAML::Value << YAML::Flow << c.angles_deg;
    e << YAML::Key << "users" << YAML::Value << c.users;
    e << YAML::Key << "angle_low_deg" << YAML::Value << c.angle_low_deg;
    e << YAML::Key << "angle_high_deg" << YAML::Value << c.angle_high_deg;
    e << YAML::Key << "narrowband" << YAML::Value << c.narrowband;
    e << YAML::Key << "paths" << YAML::Value << c.paths;
    e << YAML::Key << "delay_spread_symbols" << YAML::Value << c.delay_spread_symbols;
    e << YAML::EndMap;

    const auto &w = s.waveform;
    e << YAML::Key << "waveform" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "type" << YAML::Value << w.type;
    e << YAML::Key << "symbol_period_s" << YAML::Value << w.symbol_period_s;
    e << YAML::Key << "rolloff" << YAML::Value << w.rolloff;
    e << YAML::Key << "subcarriers" << YAML::Value << w.subcarriers;
    e << YAML::Key << "excess_bandwidth" << YAML::Value << w.excess_bandwidth;
    e << YAML::Key << "lowpass" << YAML::Value << w.lowpass;
    e << YAML::Key << "schedule" << YAML::Value << YAML::BeginSeq;
    for (const auto &x : w.schedule)
    {
        e << YAML::Flow << YAML::BeginMap;
        e << YAML::Key << "subcarrier" << YAML::Value << x.subcarrier;
        e << YAML::Key << "users" << YAML::Value << YAML::Flow << x.users;
        e << YAML::EndMap;
    }
    e << YAML::EndSeq;
    e << YAML::EndMap;

    e << YAML::Key << "precoder" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "kind" << YAML::Value << s.precoder.kind;
    e << YAML::Key << "lambda" << YAML::Value << s.precoder.lambda;
    e << YAML::EndMap;

    e << YAML::Key << "power" << YAML::Value << YAML::Flow << s.power;

    e << YAML::Key << "amplifier" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "file" << YAML::Value << s.amplifier.file;
    e << YAML::Key << "backoff_db" << YAML::Value << s.amplifier.backoff_db;
    e << YAML::EndMap;

    e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "order" << YAML::Value << s.grid.order;
    e << YAML::Key << "points_per_b" << YAML::Value << s.grid.points_per_b;
    e << YAML::EndMap;

    const auto &m = s.metrics;
    e << YAML::Key << "metrics" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "pattern_f_over_b" << YAML::Value << YAML::Flow << m.pattern_f_over_b;
    e << YAML::Key << "pattern_step_deg" << YAML::Value << m.pattern_step_deg;
    e << YAML::Key << "eigen_f_over_b" << YAML::Value << YAML::Flow << m.eigen_f_over_b;
    e << YAML::Key << "eigen_rank_threshold" << YAML::Value << m.eigen_rank_threshold;
    e << YAML::Key << "ccdf_locations" << YAML::Value << m.ccdf_locations;
    e << YAML::Key << "ccdf_count" << YAML::Value << m.ccdf_count;
    e << YAML::Key << "adjacent_lo_over_b" << YAML::Value << m.adjacent_lo_over_b;
    e << YAML::Key << "adjacent_hi_over_b" << YAML::Value << m.adjacent_hi_over_b;
    e << YAML::EndMap;

    const auto &st = s.mc.settings;
    e << YAML::Key << "mc" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "samples" << YAML::Value << st.samples;
    e << YAML::Key << "blocks" << YAML::Value << st.blocks;
    e << YAML::Key << "osf" << YAML::Value << st.osf;
    e << YAML::Key << "segment" << YAML::Value << st.welch.segment;
    e << YAML::Key << "overlap" << YAML::Value << st.welch.overlap;
    e << YAML::Key << "window" << YAML::Value << window_name(st.welch.window);
    e << YAML::Key << "average_bins" << YAML::Value << st.average_bins;
    e << YAML::Key << "mask_dbc" << YAML::Value << st.mask_dbc;
    e << YAML::Key << "band_limit" << YAML::Value << st.band_limit;
    e << YAML::Key << "drive_mismatch_db" << YAML::Value << st.drive_mismatch_db;
    e << YAML::Key << "synthesis" << YAML::Value << synthesis_name(s.mc.synthesis);
    e << YAML::Key << "tolerance_db" << YAML::Value << s.mc.tolerance_db;
    e << YAML::EndMap;

    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

std::uint64_t fnv1a64(const std::string &data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string scenario_hash(const Scenario &s)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_yaml(s))));
    return buf;
}

} // namespace arraydist
