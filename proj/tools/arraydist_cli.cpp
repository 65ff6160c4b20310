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

// Command-line front end: scenario file in, CSV/JSON artifacts out.
//
// Exit codes: 0 success, 1 schema or input error, 2 infeasible computation, 3 validation failed.
// Errors are reported as one JSON object on stdout.

#include "arraydist/experiment.hpp"
#include "arraydist/report.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace arraydist;
using nlohmann::ordered_json;

namespace
{

struct Options
{
    std::string scenario;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::optional<double> tolerance_db;
};

enum Exit
{
    kOk = 0,
    kInput = 1,
    kInfeasible = 2,
    kValidationFailed = 3
};

int report_error(const std::string &type, const std::string &field, const std::string &message, int code)
{
    ordered_json e;
    e["error"] = {{"type", type}, {"field", field}, {"message", message}};
    std::cout << e.dump() << '\n';
    std::cerr << "arraydist: " << (field.empty() ? "" : field + ": ") << message << '\n';
    return code;
}

class Output
{
  public:
    explicit Output(const std::string &dir) : dir_(dir) { fs::create_directories(dir_); }

    void text(const std::string &name, const std::function<void(std::ostream &)> &fill)
    {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write " + (dir_ / name).string());
        fill(f);
        files_.push_back(name);
    }
    void json(const std::string &name, const ordered_json &j)
    {
        text(name, [&](std::ostream &o) { o << j.dump(2) << '\n'; });
    }
    const std::vector<std::string> &files() const { return files_; }

  private:
    fs::path dir_;
    std::vector<std::string> files_;
};

std::vector<double> pattern_frequencies(const Setup &st)
{
    std::vector<double> f;
    for (double x : st.scenario.metrics.pattern_f_over_b)
        f.push_back(x * st.B());
    return f;
}

// One subcommand: load, build, analyze, then the command-specific outputs
int execute(const std::string &command, const Options &opt)
{
    Scenario sc;
    Setup st;
    std::string hash;
    try
    {
        sc = load_scenario(opt.scenario);
        if (opt.seed)
            sc.seed = *opt.seed;
        if (opt.tolerance_db)
        {
            if (!(*opt.tolerance_db > 0.0))
                throw ScenarioError("--tolerance-db", "must be positive");
            sc.mc.tolerance_db = *opt.tolerance_db;
        }
        hash = scenario_hash(sc);
    }
    catch (const ScenarioError &e)
    {
        return report_error("schema", e.field(), e.reason(), kInput);
    }
    catch (const InputError &e)
    {
        return report_error("input", "", e.what(), kInput);
    }

    int code = kOk;
    std::optional<Output> sink;
    try
    {
        st = build_setup(sc);
        sink.emplace(opt.out);
        auto &out = *sink;
        const auto D = analyze(st);
        if (command == "run" || command == "aclr")
            out.json("metrics.json", metrics_json(st, compute_metrics(st, D), hash));
        if (command == "run")
            out.text("spectra.csv", [&](std::ostream &o) { write_spectra_csv(o, st, D, hash); });
        if (command == "run" || command == "pattern")
        {
            const auto p = patterns(st, D, pattern_frequencies(st));
            out.text("pattern.csv", [&](std::ostream &o) { write_pattern_csv(o, st, p, hash); });
        }
        if (command == "run" || command == "eigen")
        {
            const auto e = eigen_analysis(st, D);
            out.text("eigen.csv", [&](std::ostream &o) { write_eigen_csv(o, st, e, hash); });
        }
        if (command == "run" || command == "ccdf")
        {
            const auto t = ccdf_analysis(st, D);
            out.text("ccdf.csv", [&](std::ostream &o) { write_ccdf_csv(o, t, hash); });
        }
        if (command == "two-tone")
        {
            const auto r = two_tone_analysis(st, D);
            out.json("two_tone.json", two_tone_json(st, r, hash));
            out.text("pattern.csv", [&](std::ostream &o) { write_pattern_csv(o, st, r.patterns, hash); });
        }
        if (command == "validate")
        {
            const auto r = mc_validation(st, D);
            out.json("validate.json", validation_json(st, r, hash));
            if (!r.pass)
                code = kValidationFailed;
        }
        out.json("provenance.json", provenance_json(st, hash, command));
    }
    catch (const InputError &e)
    {
        // Valid schema, but the configuration cannot be evaluated (ZF with K > M, grid too coarse, ..)
        return report_error("infeasible", "", e.what(), kInfeasible);
    }
    catch (const std::exception &e)
    {
        return report_error("internal", "", e.what(), kInfeasible);
    }

    ordered_json ok;
    ok["status"] = code == kOk ? "ok" : "validation_failed";
    ok["command"] = command;
    ok["scenario_hash"] = hash;
    ok["outputs"] = sink->files();
    std::cout << ok.dump() << '\n';
    return code;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"arraydist: spatial distribution of nonlinear distortion from antenna arrays"};
    app.set_version_flag("--version", std::string(ARRAYDIST_VERSION));
    app.require_subcommand(1);

    Options opt;
    std::string command;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"run", "every artifact: spectra, patterns, eigenvalues, CCDF and metrics"},
        {"validate", "Monte-Carlo check of the analytic spectra"},
        {"pattern", "radiation patterns at the configured frequencies"},
        {"aclr", "ACLR, array ACLR, directivity and direction count"},
        {"eigen", "eigenvalues of the distortion cross-spectrum"},
        {"ccdf", "CCDF of adjacent-band distortion over receiver locations"},
        {"two-tone", "intermodulation directions of a two-tone OFDM scenario"},
        {"hash", "print the canonical scenario and its hash"}};
    for (const auto &[name, help] : commands)
    {
        auto *sub = app.add_subcommand(name, help);
        sub->add_option("-s,--scenario", opt.scenario, "scenario YAML file")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", opt.out, "output directory")->capture_default_str();
        sub->add_option("--seed", opt.seed, "override the scenario seed");
        sub->add_option("--threads", opt.threads, "worker threads (computation is single-threaded)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        if (name == "validate")
            sub->add_option("--tolerance-db", opt.tolerance_db, "override mc.tolerance_db");
        sub->callback([&command, name = name] { command = name; });
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        return report_error("usage", "", e.what(), kInput);
    }

    if (command == "hash")
    {
        try
        {
            auto sc = load_scenario(opt.scenario);
            if (opt.seed)
                sc.seed = *opt.seed;
            std::cout << "# scenario_hash: " << scenario_hash(sc) << '\n' << canonical_yaml(sc) << '\n';
            return kOk;
        }
        catch (const ScenarioError &e)
        {
            return report_error("schema", e.field(), e.reason(), kInput);
        }
    }
    return execute(command, opt);
}
