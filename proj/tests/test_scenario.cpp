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

#include "arraydist/experiment.hpp"
#include "arraydist/report.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <charconv>
#include <filesystem>
#include <sstream>

using namespace arraydist;
using Catch::Approx;
namespace fs = std::filesystem;

namespace
{
const std::string kMinimal = R"(
schema_version: 1
name: minimal
array:
  antennas: 8
channel:
  type: los
  angles_deg: [-20, 30]
waveform:
  type: single_carrier
amplifier:
  file: cubic_pa.txt
)";

std::string field_of(const std::string &text)
{
    try
    {
        parse_scenario(text);
    }
    catch (const ScenarioError &e)
    {
        return e.field();
    }
    return "<accepted>";
}

std::string replace(std::string s, const std::string &from, const std::string &to)
{
    const auto p = s.find(from);
    REQUIRE(p != std::string::npos);
    return s.replace(p, from.size(), to);
}
} // namespace

TEST_CASE("scenario: omitted optional fields take their defaults", "[scenario]")
{
    const auto s = parse_scenario(kMinimal);
    CHECK(s.name == "minimal");
    CHECK(s.seed == 1);
    CHECK(s.array.antennas == 8);
    CHECK(s.array.spacing_wavelengths == 0.5);
    CHECK(s.array.carrier_hz == 3e9);
    CHECK(s.channel.users == 2);
    CHECK(s.channel.narrowband);
    CHECK(s.waveform.symbol_period_s == 1.0);
    CHECK(s.waveform.rolloff == 0.22);
    CHECK(s.precoder.kind == "MR");
    CHECK(s.power.empty());
    CHECK(s.amplifier.backoff_db == 7.0);
    CHECK(fs::path(s.amplifier.resolved_path).filename() == "cubic_pa.txt");
    CHECK(s.grid.order == 0);
    CHECK(s.grid.points_per_b == 32);
    CHECK(s.metrics.ccdf_count == 1000);
    CHECK(s.mc.synthesis == Synthesis::StationaryGaussian);
    CHECK(s.mc.tolerance_db == 0.5);
    CHECK(s.mc.settings.samples == (std::size_t{1} << 22));

    const auto o = parse_scenario(replace(kMinimal, "type: single_carrier", "type: ofdm"));
    CHECK(o.waveform.subcarriers == 64);
}

TEST_CASE("scenario: schema violations name the offending field", "[scenario]")
{
    CHECK(field_of(kMinimal) == "<accepted>");
    CHECK(field_of(replace(kMinimal, "antennas: 8", "antennas: 8\n  spacing: 0.5")) == "array.spacing");
    CHECK(field_of(replace(kMinimal, "antennas: 8", "antennas: eight")) == "array.antennas");
    CHECK(field_of(replace(kMinimal, "antennas: 8", "antennas: -3")) == "array.antennas");
    CHECK(field_of(replace(kMinimal, "type: los", "type: ray-traced")) == "channel.type");
    CHECK(field_of(replace(kMinimal, "[-20, 30]", "[-20, 130]")) == "channel.angles_deg");
    CHECK(field_of(replace(kMinimal, "type: single_carrier", "type: single_carrier\n  rolloff: 0")) ==
          "waveform.rolloff");
    CHECK(field_of(replace(kMinimal, "file: cubic_pa.txt", "file: nowhere.txt")) == "amplifier.file");
    CHECK(field_of(replace(kMinimal, "schema_version: 1", "schema_version: 2")) == "schema_version");
    CHECK(field_of(kMinimal + "power: [0.7, 0.7]\n") == "power");
    CHECK(field_of(kMinimal + "power: [1.0]\n") == "power");
    CHECK(field_of(kMinimal + "grid:\n  order: 4\n") == "grid.order");
    CHECK(field_of(kMinimal + "metrics:\n  ccdf_count: 10\n") == "metrics.ccdf_count");
    CHECK(field_of(kMinimal + "mc:\n  window: kaiser\n") == "mc.window");
    CHECK(field_of(kMinimal + "mc:\n  synthesis: white\n") == "mc.synthesis");
    CHECK(field_of(kMinimal + "precoder:\n  kind: RZF\n") == "precoder.lambda");
    CHECK(field_of(kMinimal + "typo: 1\n") == "typo");
    CHECK(field_of("array: [1\n") == "<file>");
    CHECK(field_of("") == "<root>");

    const std::string ofdm = replace(kMinimal, "type: single_carrier", "type: ofdm\n  subcarriers: 16\n  schedule:\n"
                                                                       "    - {subcarrier: 8, users: [0]}");
    CHECK(field_of(ofdm) == "waveform.schedule");
    CHECK(field_of(replace(ofdm, "subcarrier: 8, users: [0]", "subcarrier: 3, users: [2]")) == "waveform.schedule");
    CHECK(field_of(replace(ofdm, "subcarrier: 8, users: [0]", "subcarrier: -8, users: [1]")) == "<accepted>");
}

TEST_CASE("scenario: hash depends on content only", "[scenario]")
{
    // FNV-1a 64 reference vectors
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);

    const auto base = parse_scenario(kMinimal);
    const auto h = scenario_hash(base);
    CHECK(h.size() == 16);

    // Comments, key order, flow style and explicit defaults do not change the hash
    const std::string reordered = R"(
# same scenario, written differently
amplifier: {file: cubic_pa.txt, backoff_db: 7.0}
waveform:
  rolloff: 0.22
  type: single_carrier
channel:
  angles_deg:
    - -20
    - 30
  type: los
array: {antennas: 8, spacing_wavelengths: 0.5}
name: minimal
seed: 1
)";
    CHECK(scenario_hash(parse_scenario(reordered)) == h);

    // The resolved amplifier path is machine specific and excluded
    auto moved = base;
    moved.amplifier.resolved_path = "/elsewhere/cubic_pa.txt";
    CHECK(scenario_hash(moved) == h);

    auto reseeded = base;
    reseeded.seed = 2;
    CHECK(scenario_hash(reseeded) != h);
    CHECK(scenario_hash(parse_scenario(replace(kMinimal, "[-20, 30]", "[-20, 30.000001]"))) != h);

    // The canonical form parses back to the same scenario
    CHECK(scenario_hash(parse_scenario(canonical_yaml(base))) == h);
}

TEST_CASE("scenario: bundled scenarios load", "[scenario]")
{
    std::size_t n = 0;
    for (const auto &e : fs::directory_iterator(ARRAYDIST_SCENARIO_DIR))
    {
        if (e.path().extension() != ".yaml")
            continue;
        INFO(e.path().string());
        const auto s = load_scenario(e.path().string());
        CHECK(s.name == e.path().stem().string());
        CHECK_FALSE(s.amplifier.resolved_path.empty());
        ++n;
    }
    CHECK(n >= 6);
}

TEST_CASE("scenario: setup follows the scenario", "[scenario]")
{
    auto s = parse_scenario(kMinimal + "power: [0.25, 0.75]\n");
    auto st = build_setup(s);
    CHECK(st.geometry.size() == 8);
    CHECK(st.channel.users() == 2);
    CHECK(st.order == 3);
    CHECK(st.grid.size() == make_freq_grid(st.pulses.B, 3, 32).size());
    CHECK(st.xi.xi == std::vector<double>{0.25, 0.75});
    const auto p = st.Sxx.antenna_powers();
    double mean = 0.0;
    for (double x : p)
        mean += x / 8.0;
    CHECK(mean == Approx(drive_power(st.pa, 7.0)).epsilon(1e-12));
    CHECK(st.tx.amplitude > 0.0);

    // Angles drawn from the seed when not listed, inside the configured sector
    const std::string drawn = replace(kMinimal, "angles_deg: [-20, 30]", "users: 5\n  angle_low_deg: -40\n  angle_high_deg: 10");
    const auto a = build_setup(parse_scenario(drawn));
    const auto b = build_setup(parse_scenario(drawn));
    REQUIRE(a.scenario.channel.angles_deg.size() == 5);
    CHECK(a.scenario.channel.angles_deg == b.scenario.channel.angles_deg);
    for (double x : a.scenario.channel.angles_deg)
        CHECK((x >= -40.0 && x < 10.0));
    const auto c = build_setup(parse_scenario(drawn + "seed: 9\n"));
    CHECK(c.scenario.channel.angles_deg != a.scenario.channel.angles_deg);

    // ZF with more users than antennas is infeasible
    const std::string zf = replace(replace(kMinimal, "antennas: 8", "antennas: 1"), "type: single_carrier",
                                   "type: single_carrier\nprecoder:\n  kind: ZF");
    CHECK_THROWS_AS(build_setup(parse_scenario(zf)), InputError);
}

TEST_CASE("report: CSV quoting and number formatting", "[report]")
{
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
    std::ostringstream o;
    CsvWriter w(o);
    w.row({"x", "y,z", ""});
    CHECK(o.str() == "x,\"y,z\",\n");

    for (double x : {0.0, 1.0, -2.5, 0.1, 1e-300, 6.02214076e23, 1.0 / 3.0})
    {
        const auto s = format_number(x);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == x);
    }
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-HUGE_VAL) == "-inf");
    CHECK(json_number(std::nan("")).is_null());
}
