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

#include <gtest/gtest.h>

#include <sstream>

#include "certdec/config.hpp"

using namespace certdec;
using sim::Scenario;
using sim::ScenarioName;

namespace {

std::vector<ConfigDiagnostic> diagnostics_of(const std::string& text, const std::vector<std::string>& overrides = {}) {
    try {
        parse_config(text, "x.cfg", overrides);
    } catch (const ConfigError& e) {
        return e.diagnostics();
    }
    return {};
}

} // namespace

TEST(Config, ParsesSectionsListsAndComments) {
    const auto s = parse_config(
        "# comment\n[scenario]\nname = winners\n\n[model]\ntheta = 0.6, 0.6 0.55  # trailing\n"
        "sigma = 0.1,0.2,0.05\n[decision]\nalpha=0.1\n",
        "x.cfg");
    EXPECT_EQ(s.name, ScenarioName::winners);
    EXPECT_EQ(s.theta, (std::vector<double>{0.6, 0.6, 0.55}));
    EXPECT_EQ(s.sigma, (std::vector<double>{0.1, 0.2, 0.05}));
    EXPECT_EQ(s.alpha, 0.1);
}

TEST(Config, OverridesApplyLast) {
    const auto s = parse_config("seed = 1\n", "x.cfg", {"seed=7", "seed=9", "n_reps = 10"});
    EXPECT_EQ(s.seed, 9u);
    EXPECT_EQ(s.n_reps, 10u);
}

TEST(Config, PsiForms) {
    EXPECT_EQ(parse_config("psi = 0.07\n", "x").psi, Psi::affine(0.0, 0.07));
    EXPECT_EQ(parse_config("psi = affine 0.01 0.05\n", "x").psi, Psi::affine(0.01, 0.05));
    EXPECT_EQ(parse_config("psi = table 0.5:0.02 1:0.1\n", "x").psi, Psi::table({{0.5, 0.02}, {1.0, 0.1}}));
}

TEST(Config, GammaNone) {
    EXPECT_EQ(parse_config("gamma = 0.5\n", "x").gamma, 0.5);
    EXPECT_FALSE(parse_config("gamma = none\n", "x").gamma.has_value());
}

TEST(Config, RangeErrorNamesFieldAndLine) {
    const auto d = diagnostics_of("name = winners\n\nalpha = 1.5\n");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].location, "x.cfg:3");
    EXPECT_EQ(d[0].field, "alpha");
}

TEST(Config, UnknownKeyAndBadNumber) {
    const auto d = diagnostics_of("alpah = 0.1\nseed = -3\ntheta = 0.5 abc\n");
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d[0].location, "x.cfg:1");
    EXPECT_EQ(d[0].field, "alpah");
    EXPECT_EQ(d[1].field, "seed");
    EXPECT_EQ(d[2].location, "x.cfg:3");
}

TEST(Config, OverrideLocation) {
    const auto d = diagnostics_of("alpha = 0.1\n", {"n_reps=5", "u=2"});
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].location, "override 2");
    EXPECT_EQ(d[0].field, "u");
}

TEST(Config, MalformedLines) {
    EXPECT_EQ(diagnostics_of("[scenario\n").size(), 1u);
    EXPECT_EQ(diagnostics_of("just words\n").size(), 1u);
    EXPECT_EQ(diagnostics_of("= 3\n").size(), 1u);
}

TEST(Config, DumpRoundTripsDefaults) {
    const Scenario s;
    EXPECT_EQ(parse_config(dump_config(s), "dump"), s);
}

TEST(Config, DumpRoundTripsRandomScenarios) {
    CounterRng rng(99, Stream::replication, 0);
    auto awkward = [&] { return std::nextafter(rng.uniform(), 1.0); };
    for (int trial = 0; trial < 300; ++trial) {
        Scenario s;
        const double pick = rng.uniform();
        if (pick < 0.4) {
            const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 4.0);
            s.theta.clear();
            s.sigma.clear();
            for (std::size_t i = 0; i < n; ++i) {
                s.theta.push_back(awkward());
                s.sigma.push_back(0.01 + awkward());
            }
            if (n == 2 && rng.uniform() < 0.5) {
                const double r = 0.9 * awkward();
                s.correlation = {1.0, r, r, 1.0};
            }
            s.C = 0.9 * awkward();
        } else if (pick < 0.7) {
            s.name = ScenarioName::treatment;
            s.theta = {awkward()};
            s.sigma = {0.01 + awkward()};
            s.psi = rng.uniform() < 0.5 ? Psi::affine(0.0, 0.1 * awkward())
                                        : Psi::table({{0.5, 0.01 + 0.01 * awkward()}, {1.0, 0.1 + 0.01 * awkward()}});
            s.rho = 0.4 + 0.1 * awkward();
            s.kappa = 0.05 * awkward();
            s.n_actions = 2 + static_cast<std::size_t>(rng.uniform() * 60.0);
        } else {
            s.name = ScenarioName::etrack;
            s.theta_points = {-awkward(), awkward()};
            s.theta = {s.theta_points[1]};
            s.sigma = {0.1 + awkward()};
            s.C = 0.1 + awkward();
            if (rng.uniform() < 0.5) s.gamma = 0.1 + awkward();
        }
        s.alpha = 0.01 + 0.3 * awkward();
        s.u = awkward();
        s.seed = (static_cast<std::uint64_t>(rng()) << 1) | 1u;
        s.n_reps = 1 + static_cast<std::size_t>(rng.uniform() * 1e6);
        if (!s.issues().empty()) continue;
        const auto text = dump_config(s);
        const auto back = parse_config(text, "dump");
        EXPECT_EQ(back, s) << text;
        EXPECT_EQ(dump_config(back), text);
    }
}

TEST(Report, CsvIsFullPrecision) {
    sim::SimReport r;
    r.n_reps = 10;
    r.seed = 4;
    r.add_metric("x", 0.1 + 0.2, 1.0 / 3.0);
    std::ostringstream os;
    write_report_csv(os, r);
    EXPECT_EQ(os.str(), "metric,value,mc_se,n_reps,seed\nx,0.30000000000000004,0.3333333333333333,10,4\n");
}
