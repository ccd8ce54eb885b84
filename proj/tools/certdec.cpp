/*
   Copyright 2026 The certdec Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// certdec command-line tool.
//
//   certdec run <config> [key=value ...]     run the configured scenario
//   certdec adopt <config> [key=value ...]   audit an adoption rule
//   certdec ecert <config> [key=value ...]   E-certificate scenario
//   certdec audit <config> [key=value ...]   dominance audit of a challenger
//   certdec selftest                         small built-in scenarios
//
// Exit codes: 0 ok, 2 configuration error, 3 guarantee audit failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "certdec/certdec.hpp"

namespace {

using namespace certdec;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAudit = 3;

struct RunOptions {
    std::string config;
    std::vector<std::string> overrides;
    std::string out = "report.csv";
    unsigned workers = 1;
    bool dump = false;
    bool quiet = false;
};

enum class Mode { run, adopt, ecert, audit };

sim::Scenario load(const RunOptions& opt) {
    std::ifstream in(opt.config);
    if (!in) throw ConfigError({{opt.config, "", "cannot open config file"}});
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), opt.config, opt.overrides);
}

sim::SimReport dispatch(Mode mode, const sim::Scenario& s, unsigned workers) {
    switch (mode) {
    case Mode::adopt:
        return sim::run_adoption(s);
    case Mode::audit:
        return sim::run_dominance_audit(s, workers);
    case Mode::ecert:
        if (s.name != sim::ScenarioName::etrack) {
            throw ConfigError({{"config", "name", "ecert needs name = etrack"}});
        }
        return sim::run_etrack(s, workers);
    case Mode::run:
        break;
    }
    switch (s.name) {
    case sim::ScenarioName::winners: return sim::run_winners(s, workers);
    case sim::ScenarioName::treatment: return sim::run_treatment(s, workers);
    case sim::ScenarioName::etrack: return sim::run_etrack(s, workers);
    }
    throw InvalidArgument("unknown scenario");
}

int emit(const sim::SimReport& report, const RunOptions& opt) {
    std::ofstream out(opt.out, std::ios::binary);
    if (!out) {
        std::cerr << "certdec: cannot write " << opt.out << "\n";
        return kExitFailure;
    }
    write_report_csv(out, report);
    if (!opt.quiet) write_report_text(std::cout, report);
    if (!report.all_passed()) {
        for (const auto& a : report.audits) {
            if (!a.passed) std::cerr << "certdec: audit failed: " << a.name << "\n";
        }
        return kExitAudit;
    }
    return kExitOk;
}

int execute(Mode mode, const RunOptions& opt) {
    sim::Scenario s;
    try {
        s = load(opt);
        if (opt.dump) {
            std::cout << dump_config(s);
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    try {
        return emit(dispatch(mode, s, opt.workers), opt);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const sim::ScenarioError& e) {
        std::cerr << opt.config << ": " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidArgument& e) {
        std::cerr << opt.config << ": " << e.what() << "\n";
        return kExitConfig;
    }
}

int selftest(unsigned workers) {
    std::vector<std::pair<std::string, sim::SimReport>> runs;
    sim::Scenario w;
    w.theta = {0.6, 0.6, 0.55};
    w.sigma = {0.1, 0.2, 0.05};
    w.n_reps = 20000;
    w.n_draws_critval = 20000;
    runs.emplace_back("winners", sim::run_winners(w, workers));
    auto ws = w;
    ws.challenger = "studentized";
    runs.emplace_back("audit winners/studentized", sim::run_dominance_audit(ws, workers));

    sim::Scenario t;
    t.name = sim::ScenarioName::treatment;
    t.theta = {0.3};
    t.sigma = {0.1};
    t.n_reps = 20000;
    runs.emplace_back("treatment", sim::run_treatment(t, workers));
    runs.emplace_back("audit treatment/trivial", sim::run_dominance_audit(t, workers));

    sim::Scenario e;
    e.name = sim::ScenarioName::etrack;
    e.theta = {0.0};
    e.theta_points = {0.0, 1.0};
    e.sigma = {0.5};
    e.gamma = 1.0;
    e.n_reps = 20000;
    runs.emplace_back("etrack", sim::run_etrack(e, workers));

    sim::Scenario a;
    a.n_reps = 20000;
    runs.emplace_back("adopt", sim::run_adoption(a));

    bool ok = true;
    for (const auto& [label, r] : runs) {
        const bool pass = r.all_passed();
        ok = ok && pass;
        std::printf("%-28s %s (%zu audits)\n", label.c_str(), pass ? "PASS" : "FAIL", r.audits.size());
    }
    return ok ? kExitOk : kExitAudit;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified statistical decisions: run, audit and report"};
    app.require_subcommand(1);

    RunOptions opt;
    unsigned selftest_workers = 1;
    std::vector<std::pair<Mode, CLI::App*>> modes;
    auto add_mode = [&](Mode mode, const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("config", opt.config, "scenario config file")->required();
        sub->add_option("overrides", opt.overrides, "key=value overrides applied after the file");
        sub->add_option("-o,--out", opt.out, "CSV report path")->capture_default_str();
        sub->add_option("-w,--workers", opt.workers, "worker threads (0 = hardware)")->capture_default_str();
        sub->add_flag("--dump-config", opt.dump, "print the resolved config and exit");
        sub->add_flag("-q,--quiet", opt.quiet, "no text summary");
        modes.emplace_back(mode, sub);
    };
    add_mode(Mode::run, "run", "run the scenario named in the config");
    add_mode(Mode::adopt, "adopt", "worst-case audit of an adoption rule");
    add_mode(Mode::ecert, "ecert", "E-certificate scenario");
    add_mode(Mode::audit, "audit", "dominance audit against a challenger");
    auto* st = app.add_subcommand("selftest", "run small built-in scenarios");
    st->add_option("-w,--workers", selftest_workers, "worker threads (0 = hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (st->parsed()) return selftest(selftest_workers);
        for (const auto& [mode, sub] : modes) {
            if (sub->parsed()) return execute(mode, opt);
        }
    } catch (const std::exception& e) {
        std::cerr << "certdec: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
