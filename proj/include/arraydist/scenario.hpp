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

#pragma once

#include "arraydist/grid.hpp"
#include "arraydist/mc_oracle.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace arraydist
{

constexpr int kScenarioSchemaVersion = 1;

// Schema violation: names the offending field with its dotted path
class ScenarioError : public InputError
{
  public:
    ScenarioError(std::string field, const std::string &reason)
        : InputError(field + ": " + reason), field_(std::move(field)), reason_(reason)
    {
    }
    const std::string &field() const { return field_; }
    const std::string &reason() const { return reason_; }

  private:
    std::string field_;
    std::string reason_;
};

struct ArraySpec
{
    std::size_t antennas = 0;
    double spacing_wavelengths = 0.5;
    double carrier_hz = 3.0e9;
};

struct ChannelSpec
{
    std::string type = "los"; // los | multipath
    std::vector<double> angles_deg; // los: explicit user angles
    std::size_t users = 0;          // los without angles: drawn uniformly; multipath: user count
    double angle_low_deg = -90.0;
    double angle_high_deg = 90.0;
    bool narrowband = true;             // los only
    std::size_t paths = 60;             // multipath
    double delay_spread_symbols = 1.0;  // multipath sigma_tau / T
};

struct ScheduleEntry
{
    int subcarrier = 0; // signed index nu
    std::vector<std::size_t> users;
};

struct WaveformSpec
{
    std::string type = "single_carrier"; // single_carrier | ofdm
    double symbol_period_s = 1.0;
    double rolloff = 0.22;
    int subcarriers = 1;
    double excess_bandwidth = 1.22;
    bool lowpass = false;
    std::vector<ScheduleEntry> schedule; // empty: every user on every subcarrier
};

struct PrecoderConfig
{
    std::string kind = "MR";
    double lambda = 0.0;
};

struct AmplifierSpec
{
    std::string file;          // as written
    std::string resolved_path; // after lookup
    double backoff_db = 7.0;
};

struct GridSpec
{
    int order = 0; // 0: the amplifier order (at least 3)
    int points_per_b = 32;
};

struct MetricsSpec
{
    std::vector<double> pattern_f_over_b = {0.0, 1.0};
    double pattern_step_deg = 0.25;
    std::vector<double> eigen_f_over_b = {1.0};
    double eigen_rank_threshold = 1e-9;
    std::string ccdf_locations = "los"; // los | fading
    std::size_t ccdf_count = 1000;
    double adjacent_lo_over_b = 0.5;
    double adjacent_hi_over_b = 1.5;
};

struct McSpec
{
    McSettings settings;
    Synthesis synthesis = Synthesis::StationaryGaussian;
    double tolerance_db = 0.5;
};

struct Scenario
{
    int schema_version = kScenarioSchemaVersion;
    std::string name = "unnamed";
    std::string description;
    std::uint64_t seed = 1;
    ArraySpec array;
    ChannelSpec channel;
    WaveformSpec waveform;
    PrecoderConfig precoder;
    std::vector<double> power; // empty: equal split
    AmplifierSpec amplifier;
    GridSpec grid;
    MetricsSpec metrics;
    McSpec mc;
};

// Parse YAML text; relative amplifier files resolve against base_dir, then the bundled data directory
Scenario parse_scenario(const std::string &text, const std::string &base_dir = ".");
Scenario load_scenario(const std::string &path);

// Effective scenario (all defaults filled in) as YAML with a fixed key order
std::string canonical_yaml(const Scenario &s);

// FNV-1a 64 of the canonical YAML, as 16 hex digits
std::string scenario_hash(const Scenario &s);
std::uint64_t fnv1a64(const std::string &data);

} // namespace arraydist
