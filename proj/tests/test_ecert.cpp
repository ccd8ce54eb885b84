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

#include <random>

#include "certdec/ecert.hpp"
#include "certdec/rng.hpp"

using namespace certdec;

namespace {

struct TwoState {
    ParamGrid grid = ParamGrid::line({0.0, 1.0}, "t");
    LossSpec spec = table_loss(grid, {{0.8, 0.4}, {0.5, 0.7}}, {"a1", "a2"});
};

EVariableField field(std::vector<double> v) { return {std::move(v), "test"}; }

} // namespace

TEST(EPosterior, UnitEValuesGiveMinimax) {
    TwoState t;
    const auto d = eposterior_decide(field({1.0, 1.0}), t.spec, t.grid);
    EXPECT_EQ(d.action, 1u);
    EXPECT_EQ(d.risk_bound, 0.7);
    ASSERT_TRUE(d.is_e());
    EXPECT_EQ(std::get<EMultiple>(d.kind).multiple, 1.0);
}

TEST(EPosterior, TwoStateExample) {
    TwoState t;
    const auto d = eposterior_decide(field({2.0, 0.5}), t.spec, t.grid);
    EXPECT_EQ(d.action, 0u);
    EXPECT_DOUBLE_EQ(d.risk_bound, 0.8);
}

TEST(EPosterior, ZeroEValueIsInfinite) {
    TwoState t;
    const auto d = eposterior_decide(field({0.0, 1.0}), t.spec, t.grid);
    EXPECT_EQ(d.risk_bound, kInf);
    EXPECT_THROW(eposterior_decide(field({-1.0, 1.0}), t.spec, t.grid), InvalidArgument);
    EXPECT_THROW(eposterior_decide(field({1.0}), t.spec, t.grid), InvalidArgument);
}

TEST(EPosterior, NeedsPositiveLoss) {
    const auto grid = ParamGrid::line({0.0, 1.0}, "t");
    const auto spec = table_loss(grid, {{0.0, 0.4}}, {});
    EXPECT_THROW(eposterior_decide(field({1.0, 1.0}), spec, grid), InvalidArgument);
}

TEST(Inversion, ConstantLoss) {
    const auto grid = ParamGrid::line({0.0, 0.5, 1.0}, "t");
    const auto spec = table_loss(grid, {{0.3, 0.3, 0.3}, {0.1, 0.9, 0.9}}, {});
    const auto e = invert_e_certificate(0, 0.3, spec, grid);
    for (double v : e.values) EXPECT_EQ(v, 1.0);
    EXPECT_LE(eposterior_decide(e, spec, grid).risk_bound, 0.3);
}

TEST(Inversion, TwoStateExample) {
    TwoState t;
    const auto e = invert_e_certificate(1, 1.4, t.spec, t.grid);
    EXPECT_NEAR(e.values[0], 0.5 / 1.4, 1e-15);
    EXPECT_NEAR(e.values[1], 0.5, 1e-15);
    EXPECT_LE(eposterior_decide(e, t.spec, t.grid).risk_bound, 1.4);
}

TEST(Inversion, Errors) {
    TwoState t;
    EXPECT_THROW(invert_e_certificate(0, 0.0, t.spec, t.grid), InvalidArgument);
    EXPECT_THROW(invert_e_certificate(0, kInf, t.spec, t.grid), InvalidArgument);
    EXPECT_THROW(invert_e_certificate(2, 1.0, t.spec, t.grid), InvalidArgument);
}

TEST(Inversion, NeverExceedsInputOnRandomTables) {
    CounterRng rng(21, Stream::replication, 0);
    const auto grid = ParamGrid::line(linspace(0.0, 1.0, 7), "t");
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<std::vector<double>> table(4, std::vector<double>(grid.size()));
        for (auto& row : table) {
            for (auto& v : row) v = 1e-3 + 3.0 * rng.uniform();
        }
        const auto spec = table_loss(grid, table, {});
        const std::size_t a = static_cast<std::size_t>(rng.uniform() * 4.0);
        const double r = 1e-6 + 10.0 * rng.uniform();
        const auto d = eposterior_decide(invert_e_certificate(a, r, spec, grid), spec, grid);
        ASSERT_LE(d.risk_bound, r);
    }
}

TEST(Truncated, TwoStateExample) {
    TwoState t;
    const auto d = truncated_eposterior_decide(field({2.0, 0.5}), 1.0, t.spec, t.grid);
    EXPECT_EQ(d.action, 0u);
    EXPECT_NEAR(d.risk_bound, 0.8 / 3.0, 1e-15);
    EXPECT_EQ(std::get<EMultiple>(d.kind).multiple, 2.0);
}

TEST(Truncated, ZeroEValueStaysFinite) {
    TwoState t;
    const auto d = truncated_eposterior_decide(field({0.0, 0.0}), 0.5, t.spec, t.grid);
    EXPECT_EQ(d.risk_bound, 0.7);
}

TEST(Truncated, SmallGammaApproachesMinimax) {
    TwoState t;
    const auto d = truncated_eposterior_decide(field({2.0, 0.5}), 1e-9, t.spec, t.grid);
    EXPECT_NEAR(d.risk_bound, eposterior_decide(field({1.0, 1.0}), t.spec, t.grid).risk_bound, 1e-6);
    EXPECT_THROW(truncated_eposterior_decide(field({1.0, 1.0}), 0.0, t.spec, t.grid), InvalidArgument);
}

TEST(AdoptionFactor, Values) {
    EXPECT_DOUBLE_EQ(e_adoption_risk_factor(1.0, 0.5), 1.0);
    EXPECT_DOUBLE_EQ(e_adoption_risk_factor(0.2, 1.0), 1.2);
    EXPECT_DOUBLE_EQ(e_adoption_risk_factor(0.0, 0.7), 0.7);
    EXPECT_THROW(e_adoption_risk_factor(-1.0, 0.5), InvalidArgument);
    EXPECT_THROW(e_adoption_risk_factor(1.0, 0.0), InvalidArgument);
}

TEST(LikelihoodRatio, HasUnitMean) {
    const auto grid = ParamGrid::line({-0.5, 0.0, 1.0}, "t");
    for (std::size_t truth = 0; truth < grid.size(); ++truth) {
        double sum = 0.0;
        const int n = 200000;
        std::normal_distribution<double> nd;
        std::vector<double> draws(n);
        for (int i = 0; i < n; ++i) {
            CounterRng rng(17, Stream::replication, static_cast<std::uint64_t>(i));
            const double x = grid[truth][0] + 1.0 * nd(rng);
            draws[i] = likelihood_ratio_field(grid, x, 1.0).values[truth];
            sum += draws[i];
        }
        const double mean = sum / n;
        double var = 0.0;
        for (double d : draws) var += (d - mean) * (d - mean);
        EXPECT_NEAR(mean, 1.0, 4.0 * std::sqrt(var / n / n)) << truth;
    }
}

TEST(LikelihoodRatio, TwoPointClosedForm) {
    const auto grid = ParamGrid::line({0.0, 1.0}, "t");
    const auto f = likelihood_ratio_field(grid, 0.3, 0.5);
    const double lr = std::exp((0.3 * 1.0 - 0.5) / 0.25);
    EXPECT_NEAR(f.values[0], lr, 1e-12);
    EXPECT_NEAR(f.values[1], 1.0 / lr, 1e-12);
}
