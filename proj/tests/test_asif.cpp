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

#include "certdec/asif.hpp"

using namespace certdec;

namespace {

struct TwoByTwo {
    ParamGrid grid = ParamGrid::line({0.2, 0.6}, "t");
    LossSpec spec = table_loss(grid, {{0.8, 0.4}, {0.5, 0.7}}, {"a1", "a2"});
};

ConfidenceSet subset(const ParamGrid& grid, std::vector<double> keep) {
    return ConfidenceSet(
               [keep](const ParamPoint& p) { return std::find(keep.begin(), keep.end(), p[0]) != keep.end(); },
               0.95, Construction::trivial)
        .materialized(grid);
}

} // namespace

TEST(WorstCase, Enumerates) {
    TwoByTwo t;
    EXPECT_EQ(worst_case_loss(0, subset(t.grid, {0.2, 0.6}), t.spec, t.grid), 0.8);
    EXPECT_EQ(worst_case_loss(0, subset(t.grid, {}), t.spec, t.grid), 0.0);
    EXPECT_EQ(worst_case_loss(1, subset(t.grid, {0.6}), t.spec, t.grid), 0.7);
}

TEST(AsIf, PicksMinimax) {
    TwoByTwo t;
    const auto d = asif_decide(subset(t.grid, {0.2, 0.6}), t.spec, t.grid);
    EXPECT_EQ(d.action, 1u);
    EXPECT_EQ(d.risk_bound, 0.7);
    EXPECT_FALSE(d.vacuous);
    ASSERT_TRUE(d.is_p());
    EXPECT_EQ(std::get<PLevel>(d.kind).level, 0.95);
}

TEST(AsIf, EmptySetIsVacuous) {
    TwoByTwo t;
    const auto d = asif_decide(subset(t.grid, {}), t.spec, t.grid);
    EXPECT_EQ(d.action, 0u);
    EXPECT_EQ(d.risk_bound, 0.0);
    EXPECT_TRUE(d.vacuous);
}

TEST(AsIf, TiesGoToLowestIndex) {
    const auto grid = ParamGrid::line({0.0}, "t");
    const auto spec = table_loss(grid, {{0.5}, {0.3}, {0.3}}, {});
    EXPECT_EQ(asif_decide(subset(grid, {0.0}), spec, grid).action, 1u);
}

TEST(AsIf, MonotoneInTheSet) {
    const auto grid = ParamGrid::line(linspace(0.0, 1.0, 41), "t");
    const auto spec = treatment_loss(linspace(0.5, 1.0, 11), Psi::table({{0.5, 0.01}, {1.0, 0.2}}));
    CounterRng rng(1, Stream::replication, 0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> small, large;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double u = rng.uniform();
            if (u < 0.2) small.push_back(grid[i][0]);
            if (u < 0.5) large.push_back(grid[i][0]);
        }
        EXPECT_LE(asif_decide(subset(grid, small), spec, grid).risk_bound,
                  asif_decide(subset(grid, large), spec, grid).risk_bound);
    }
}

TEST(Analytic, WinnersBoxMatchesGrid) {
    const auto spec = winners_loss(2);
    const auto axis = linspace(0.0, 1.0, 99);
    for (const WinnersData data : {WinnersData{{0.6, 0.55}, {0.3, 0.05}}, WinnersData{{0.1, 0.9}, {0.2, 0.2}},
                                   WinnersData{{1.2, 0.4}, {0.1, 0.3}}}) {
        for (double c : {0.0, 0.5, 1.0, 2.0}) {
            const auto set = projection_box(data, c, true, 0.95);
            const auto& box = *set.box();
            const auto grid = ParamGrid::product({merge_axis(axis, {std::min(box.lower[0], 1.0)}), merge_axis(axis, {std::min(box.lower[1], 1.0)})}, "g");
            const auto g = asif_decide(set.materialized(grid), spec, grid);
            const auto a = asif_decide_analytic(set, spec);
            EXPECT_EQ(g.action, a.action);
            EXPECT_NEAR(g.risk_bound, a.risk_bound, 1e-12);
        }
    }
}

TEST(Analytic, StudentizedArgmax) {
    const WinnersData data{{0.6, 0.55}, {0.3, 0.05}};
    const auto certs = projection_certificates(data, 0.05, CriticalValues{0.5, 2.0}, winners_loss(2));
    EXPECT_EQ(certs.projection.action, 0u);
    EXPECT_EQ(certs.studentized.action, 0u);
    EXPECT_EQ(certs.risk_aware.action, 1u);
    EXPECT_NEAR(certs.risk_aware.risk_bound, 0.55, 1e-15);
    EXPECT_NEAR(certs.studentized.risk_bound, 1.0, 1e-15);
    EXPECT_NEAR(certs.projection.risk_bound, 0.9, 1e-15);
}

TEST(Analytic, EqualSigmaAgrees) {
    const WinnersData data{{0.6, 0.5}, {0.1, 0.1}};
    const auto certs = projection_certificates(data, 0.05, 7, 10000);
    EXPECT_EQ(certs.projection.action, 0u);
    EXPECT_EQ(certs.risk_aware.action, 0u);
    EXPECT_NEAR(certs.risk_aware.risk_bound, certs.studentized.risk_bound, 1e-15);
}

TEST(Analytic, RiskAwareNeverAboveStudentized) {
    CounterRng rng(4, Stream::replication, 0);
    const auto spec = winners_loss(4);
    for (int trial = 0; trial < 20000; ++trial) {
        WinnersData data{std::vector<double>(4), std::vector<double>(4)};
        for (int a = 0; a < 4; ++a) {
            data.x[a] = 1.4 * rng.uniform() - 0.2;
            data.sigma[a] = 0.01 + 0.5 * rng.uniform();
        }
        const double c = 3.0 * rng.uniform();
        const auto certs = projection_certificates(data, 0.05, CriticalValues{c, c}, spec);
        ASSERT_LE(certs.risk_aware.risk_bound, certs.studentized.risk_bound);
    }
}

TEST(Analytic, TreatmentMinimizationMatchesGrid) {
    const auto spec = treatment_loss(linspace(0.5, 1.0, 51), Psi::affine(0.01, 0.05));
    const auto axis = linspace(0.0, 1.0, 9973);
    for (double hat : {-0.3, 0.0, 0.137, 0.5, 0.81, 1.0, 1.2}) {
        const auto set = uma_lower_set(hat, 0.0, 1.0, 0.95);
        const auto grid = ParamGrid::line(merge_axis(axis, {std::clamp(hat, 0.0, 1.0)}), "t");
        const auto g = asif_decide(set.materialized(grid), spec, grid);
        const auto a = asif_decide_analytic(set, spec);
        EXPECT_EQ(g.action, a.action) << hat;
        EXPECT_NEAR(g.risk_bound, a.risk_bound, 1e-12) << hat;
        EXPECT_EQ(g.vacuous, a.vacuous);
    }
}

TEST(Analytic, RequiresBox) {
    TwoByTwo t;
    EXPECT_THROW(asif_decide_analytic(subset(t.grid, {0.2}), t.spec), InvalidArgument);
}
