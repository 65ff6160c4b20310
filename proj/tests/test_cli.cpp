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

#include <catch2/catch_amalgamated.hpp>

#include "json.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{
struct Result
{
    int code = -1;
    std::string out;
};

Result cli(const std::string &args)
{
    const std::string cmd = std::string(ARRAYDIST_CLI) + " " + args + " 2>/dev/null";
    Result r;
    FILE *p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0)
        r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string scenario(const std::string &name)
{
    return std::string(ARRAYDIST_SCENARIO_DIR) + "/" + name + ".yaml";
}

std::string fixture(const std::string &name)
{
    return std::string(ARRAYDIST_FIXTURE_DIR) + "/" + name;
}

fs::path scratch(const std::string &tag)
{
    const auto d = fs::temp_directory_path() / ("arraydist_cli_" + std::to_string(getpid()) + "_" + tag);
    fs::remove_all(d);
    return d;
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path &p)
{
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line))
    {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string x;
        while (std::getline(ss, x, ','))
            f.push_back(x);
        rows.push_back(f);
    }
    return rows;
}
} // namespace

TEST_CASE("cli: repeated runs are byte-identical and carry the scenario hash", "[cli]")
{
    const auto a = scratch("a"), b = scratch("b");
    const auto ra = cli("run --scenario " + scenario("single-user-los") + " --out " + a.string());
    const auto rb = cli("run --scenario " + scenario("single-user-los") + " --out " + b.string() + " --threads 4");
    REQUIRE(ra.code == 0);
    REQUIRE(rb.code == 0);
    const auto status = json::parse(ra.out);
    const std::string hash = status["scenario_hash"];
    CHECK(hash.size() == 16);

    std::size_t files = 0;
    for (const auto &e : fs::directory_iterator(a))
    {
        const auto name = e.path().filename();
        INFO(name.string());
        CHECK(slurp(e.path()) == slurp(b / name));
        if (e.path().extension() == ".csv")
        {
            const auto rows = read_csv(e.path());
            REQUIRE(rows.size() > 1);
            CHECK(rows[0][0] == "scenario_hash");
            for (std::size_t i = 1; i < rows.size(); ++i)
                REQUIRE(rows[i][0] == hash);
        }
        else
            CHECK(json::parse(slurp(e.path()))["scenario_hash"] == hash);
        ++files;
    }
    CHECK(files == 6);

    // Provenance: versions and seed, nothing machine specific
    const auto prov = json::parse(slurp(a / "provenance.json"));
    CHECK(prov["schema_version"] == 1);
    CHECK(prov["seed"] == 1);
    CHECK(prov["amplifier"]["name"] == "reference");
    CHECK(slurp(a / "provenance.json").find(fs::path(ARRAYDIST_SCENARIO_DIR).parent_path().string()) ==
          std::string::npos);

    // A different seed is a different scenario
    const auto rc = cli("aclr --scenario " + scenario("single-user-los") + " --out " + a.string() + " --seed 5");
    REQUIRE(rc.code == 0);
    CHECK(json::parse(rc.out)["scenario_hash"] != hash);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("cli: errors are machine readable", "[cli]")
{
    const auto d = scratch("err");
    auto r = cli("run --scenario " + fixture("malformed.yaml") + " --out " + d.string());
    CHECK(r.code == 1);
    auto e = json::parse(r.out);
    CHECK(e["error"]["type"] == "schema");
    CHECK(e["error"]["field"] == "waveform.rolloff");
    CHECK_FALSE(fs::exists(d));

    r = cli("run --scenario " + fixture("zf_overloaded.yaml") + " --out " + d.string());
    CHECK(r.code == 2);
    CHECK(json::parse(r.out)["error"]["type"] == "infeasible");

    r = cli("validate --scenario " + scenario("validate-small") + " --tolerance-db -1 --out " + d.string());
    CHECK(r.code == 1);
    CHECK(json::parse(r.out)["error"]["field"] == "--tolerance-db");

    r = cli("run");
    CHECK(r.code == 1);
    CHECK(json::parse(r.out)["error"]["type"] == "usage");
    fs::remove_all(d);
}

TEST_CASE("cli: two-tone intermodulation directions", "[cli]")
{
    const auto d = scratch("tt");
    const auto r = cli("two-tone --scenario " + scenario("two-tone") + " --out " + d.string());
    REQUIRE(r.code == 0);
    const auto j = json::parse(slurp(d / "two_tone.json"));
    std::map<int, double> peak;
    for (const auto &l : j["lines"])
    {
        CHECK(l["error_deg"].get<double>() < 0.5);
        peak[l["subcarrier"].get<int>()] = l["peak_deg"];
    }
    REQUIRE(peak.count(120));
    REQUIRE(peak.count(-135));
    const double deg = 180.0 / M_PI;
    CHECK(peak[120] == Catch::Approx(std::asin(2.0 * std::sin(5.0 / deg) - std::sin(-15.0 / deg)) * deg).margin(0.5));
    CHECK(peak[-135] == Catch::Approx(std::asin(2.0 * std::sin(-15.0 / deg) - std::sin(5.0 / deg)) * deg).margin(0.5));
    CHECK(fs::exists(d / "pattern.csv"));
    fs::remove_all(d);
}

TEST_CASE("cli: third order dominates the nearest adjacent band", "[cli]")
{
    const auto d = scratch("ofdm");
    const auto r = cli("run --scenario " + scenario("ofdm-10-users") + " --out " + d.string());
    REQUIRE(r.code == 0);
    std::map<std::string, double> band;
    for (const auto &row : read_csv(d / "spectra.csv"))
    {
        if (row[0] == "scenario_hash")
            continue;
        const double fb = std::stod(row[2]);
        if (std::abs(fb) > 0.5 && std::abs(fb) < 1.5)
            band[row[3]] += std::stod(row[4]);
    }
    REQUIRE(band.count("order3"));
    for (const char *o : {"order5", "order7", "order9"})
        CHECK(band["order3"] > 10.0 * band[o]);
    CHECK(band["order3"] > 0.9 * band["distortion"]);

    const auto m = json::parse(slurp(d / "metrics.json"));
    CHECK(m["directions"]["omnidirectional"] == true);
    fs::remove_all(d);
}

TEST_CASE("cli: Monte-Carlo validation verdicts", "[cli][slow]")
{
    const auto d = scratch("val");
    auto r = cli("validate --scenario " + scenario("validate-small") + " --out " + d.string());
    CHECK(r.code == 0);
    CHECK(json::parse(slurp(d / "validate.json"))["pass"] == true);

    r = cli("validate --scenario " + scenario("validate-linear") + " --out " + d.string());
    CHECK(r.code == 0);
    auto v = json::parse(slurp(d / "validate.json"));
    CHECK(v["pass"] == true);
    CHECK(v["tolerance_db"] == 0.1);

    r = cli("validate --scenario " + scenario("negative-control") + " --out " + d.string());
    CHECK(r.code == 3);
    CHECK(json::parse(r.out)["status"] == "validation_failed");
    CHECK(json::parse(slurp(d / "validate.json"))["pass"] == false);
    fs::remove_all(d);
}
