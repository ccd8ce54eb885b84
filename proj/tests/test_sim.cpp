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

#include <cstring>

#include "certdec/sim/adoption_sim.hpp"
#include "certdec/sim/audit.hpp"
#include "certdec/sim/etrack.hpp"
#include "certdec/sim/treatment.hpp"
#include "certdec/sim/winners.hpp"

using namespace certdec;
using namespace certdec::sim;

namespace {

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void expect_identical(const SimReport& a, const SimReport& b) {
    ASSERT_EQ(a.metrics.size(), b.metrics.size());
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
        EXPECT_EQ(a.metrics[i].name, b.metrics[i].name);
        EXPECT_TRUE(bit_equal(a.metrics[i].value, b.metrics[i].value)) << a.metrics[i].name;
        EXPECT_TRUE(bit_equal(a.metrics[i].mc_se, b.metrics[i].mc_se)) << a.metrics[i].name;
    }
    ASSERT_EQ(a.audits.size(), b.audits.size());
    for (std::size_t i = 0; i < a.audits.size(); ++i) EXPECT_EQ(a.audits[i].passed, b.audits[i].passed);
}

Scenario small_winners() {
    Scenario s;
    s.theta = {0.6, 0.6, 0.55};
    s.sigma = {0.1, 0.2, 0.05};
    s.n_reps = 5000;
    s.n_draws_critval = 20000;
    s.seed = 3;
    return s;
}

Scenario small_treatment(double theta) {
    Scenario s;
    s.name = ScenarioName::treatment;
    s.theta = {theta};
    s.sigma = {0.1};
    s.n_reps = 5000;
    return s;
}

void expect_rates_in_unit(const SimReport& r) {
    for (const auto& m : r.metrics) {
        if (m.name.find("rate") == std::string::npos) continue;
        EXPECT_GE(m.value, 0.0) << m.name;
        EXPECT_LE(m.value, 1.0) << m.name;
        EXPECT_NEAR(m.mc_se, std::sqrt(m.value * (1.0 - m.value) / static_cast<double>(r.n_reps)), 1e-15)
            << m.name;
    }
}

} // namespace

TEST(CompensatedSum, RecoversSmallTerms) {
    CompensatedSum s;
    s.add(1e16);
    for (int i = 0; i < 1000; ++i) s.add(1.0);
    s.add(-1e16);
    EXPECT_EQ(s.value(), 1000.0);
}

TEST(Replications, IndependentOfWorkers) {
    auto fn = [](std::size_t rep, std::span<double> row) {
        CounterRng rng(5, Stream::replication, rep);
        row[0] = rng.uniform();
        row[1] = rng.uniform() < 0.3;
    };
    const auto a = run_replications(2, 10000, 1, fn);
    for (unsigned w : {2u, 3u, 8u}) {
        const auto b = run_replications(2, 10000, w, fn);
        EXPECT_TRUE(bit_equal(a.sum(0), b.sum(0)));
        EXPECT_TRUE(bit_equal(a.mean_se(0), b.mean_se(0)));
        EXPECT_EQ(a.sum(1), b.sum(1));
        EXPECT_EQ(b.n(), 10000u);
    }
}

TEST(Replications, PropagatesExceptions) {
    auto fn = [](std::size_t rep, std::span<double>) {
        if (rep == 4321) throw InvalidArgument("boom");
    };
    EXPECT_THROW(run_replications(1, 10000, 3, fn), InvalidArgument);
}

TEST(Scenario, Validation) {
    Scenario s;
    EXPECT_NO_THROW(s.validate());
    s.alpha = 1.5;
    try {
        s.validate();
        FAIL();
    } catch (const ScenarioError& e) {
        ASSERT_EQ(e.issues().size(), 1u);
        EXPECT_EQ(e.issues()[0].field, "alpha");
    }
    Scenario z;
    z.sigma = {0.1, 0.0};
    EXPECT_THROW(z.validate(), ScenarioError);
    Scenario c;
    c.correlation = {1.0, 2.0, 2.0, 1.0};
    EXPECT_THROW(c.validate(), ScenarioError);
    Scenario t = small_treatment(0.5);
    t.kappa = 0.6;
    EXPECT_THROW(t.validate(), ScenarioError);
    Scenario e;
    e.name = ScenarioName::etrack;
    e.theta = {0.5};
    EXPECT_THROW(e.validate(), ScenarioError);
}

TEST(Winners, DeterministicAcrossWorkers) {
    const auto s = small_winners();
    const auto a = run_winners(s, 1);
    expect_identical(a, run_winners(s, 1));
    expect_identical(a, run_winners(s, 4));
    expect_rates_in_unit(a);
}

TEST(Winners, CorrelatedDeterministicAcrossWorkers) {
    auto s = small_winners();
    s.correlation = {1.0, 0.5, 0.5, 0.5, 1.0, 0.5, 0.5, 0.5, 1.0};
    s.n_reps = 20000;
    const auto a = run_winners(s, 1);
    for (int i = 0; i < 5; ++i) expect_identical(a, run_winners(s, 8));
}

TEST(Winners, SeedChangesResults) {
    auto s = small_winners();
    const auto a = run_winners(s);
    s.seed = 4;
    const auto b = run_winners(s);
    EXPECT_NE(a.metric("mean_R").value, b.metric("mean_R").value);
}

TEST(Winners, EqualSigmaAgrees) {
    auto s = small_winners();
    s.theta = {0.6, 0.6};
    s.sigma = {0.1, 0.1};
    const auto r = run_winners(s);
    EXPECT_EQ(r.metric("action_differs_count").value, 0.0);
    EXPECT_EQ(r.metric("dominance_violations").value, 0.0);
}

TEST(Treatment, ThresholdBisection) {
    const auto s = small_treatment(0.5);
    const auto spec = treatment_spec(s);
    const double C = s.effective_C();
    const double t = adoption_threshold(spec, C);
    EXPECT_NEAR(min_loss_at(spec, t), C, 1e-9);
    // psi(a) = 0.05 a is minimized at a = 0.5: 0.5 (1 - t) + 0.025 = 0.45.
    EXPECT_NEAR(t, 0.15, 1e-9);
}

TEST(Treatment, NearlyNoiselessIsFullInformation) {
    auto s = small_treatment(0.8);
    s.sigma = {1e-6};
    const auto r = run_treatment(s);
    EXPECT_NEAR(r.metric("mean_R").value, r.metric("full_info_R").value, 1e-5);
    EXPECT_EQ(r.metric("adoption_rate").value, 1.0);
    auto low = small_treatment(0.1);
    low.sigma = {1e-6};
    EXPECT_EQ(run_treatment(low).metric("adoption_rate").value, 0.0);
}

TEST(Treatment, DeterministicAcrossWorkers) {
    const auto s = small_treatment(0.3);
    expect_identical(run_treatment(s, 1), run_treatment(s, 3));
    expect_rates_in_unit(run_treatment(s));
}

TEST(Audit, SelfComparisonIsZero) {
    auto w = small_winners();
    w.challenger = "self";
    const auto r = run_dominance_audit(w);
    EXPECT_EQ(r.metric("inversion.tail_stat_max").value, 0.0);
    EXPECT_TRUE(r.all_passed());
    auto t = small_treatment(0.3);
    t.challenger = "self";
    const auto rt = run_dominance_audit(t);
    EXPECT_EQ(rt.metric("uma.tail_stat_max").value, 0.0);
    EXPECT_TRUE(rt.all_passed());
}

TEST(Audit, UncertifiedChallengerIsFlagged) {
    const auto s = small_winners();
    Challenger liar = [](const Observation&, CounterRng&) { return ChallengerDraw{0, 0.0}; };
    const auto r = run_dominance_audit(s, liar);
    EXPECT_FALSE(r.audit("challenger_certified").passed);
    EXPECT_EQ(r.metric("dominance_claim_suppressed").value, 1.0);
    EXPECT_THROW(r.audit("inversion.pathwise_dominance"), InvalidArgument);
}

TEST(Audit, UnknownChallenger) {
    auto t = small_treatment(0.3);
    EXPECT_THROW(make_challenger(t, "studentized"), InvalidArgument);
}

TEST(ETrack, AuditsPass) {
    Scenario e;
    e.name = ScenarioName::etrack;
    e.theta = {1.0};
    e.theta_points = {0.0, 0.5, 1.0};
    e.sigma = {0.4};
    e.gamma = 0.5;
    e.n_reps = 20000;
    const auto r = run_etrack(e);
    EXPECT_TRUE(r.all_passed());
    EXPECT_EQ(r.metric("nonpositive_R").value, 0.0);
    expect_identical(r, run_etrack(e, 2));
}

TEST(Adoption, ConstantRuleOverBudget) {
    Scenario s;
    s.rule = "constant";
    s.n_reps = 2000;
    const auto r = run_adoption(s);
    EXPECT_GT(r.metric("lemma_worst_case").value, r.metric("budget").value);
    EXPECT_FALSE(r.audit("lemma_budget").passed);
    EXPECT_FALSE(r.audit("exact_risk_bound").passed);
    EXPECT_FALSE(r.all_passed());
    EXPECT_NEAR(r.metric("probe_exact_risk_max").value, s.C + s.u * (1.0 - s.C), 1e-15);
}

TEST(Adoption, ThresholdWithinBudget) {
    Scenario s;
    s.n_reps = 20000;
    const auto r = run_adoption(s);
    EXPECT_TRUE(r.all_passed());
    EXPECT_NEAR(r.metric("lemma_worst_case").value, r.metric("budget").value, 1e-15);
}
