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

// Adoption audit: worst-case risk of an adoption rule over two-point laws
// and their mixtures, all respecting P{L <= R} >= 1 - alpha, against the
// budget C + u alpha (1 - C).

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "certdec/adoption.hpp"
#include "certdec/sim/harness.hpp"

namespace certdec::sim {

inline AdoptionRule scenario_rule(const Scenario& s) {
    return s.rule == "constant" ? constant_rule(s.u) : threshold_rule(s.C, s.u);
}

/// Two-point laws probing the rule: a in {0, alpha/2, alpha},
/// r_minus in {0, C/2, C, 1}, r_plus in {C, (C + 1)/2, 1}.
inline std::vector<TwoPointLaw> probe_laws(double alpha, double C) {
    std::vector<TwoPointLaw> laws;
    for (double a : {0.0, alpha / 2.0, alpha}) {
        for (double rm : {0.0, C / 2.0, C, 1.0}) {
            for (double rp : {C, (C + 1.0) / 2.0, 1.0}) laws.push_back({a, rm, rp});
        }
    }
    return laws;
}

/// Mixture of two-point laws; each component respects the certificate
/// constraint, so the mixture does too.
struct TwoPointMixture {
    std::vector<TwoPointLaw> laws;
    std::vector<double> weights;  ///< sums to 1

    double risk(const AdoptionRule& rule, double C) const {
        double r = 0.0;
        for (std::size_t k = 0; k < laws.size(); ++k) r += weights[k] * laws[k].risk(rule, C);
        return r;
    }

    std::vector<LossCertificate> sample(std::size_t n, std::uint64_t key) const {
        std::vector<LossCertificate> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            CounterRng rng(key, Stream::two_point, i);
            double pick = rng.uniform();
            std::size_t k = 0;
            while (k + 1 < laws.size() && pick >= weights[k]) pick -= weights[k++];
            const auto& law = laws[k];
            out[i] = rng.uniform() < law.a ? LossCertificate{1.0, law.r_minus} : LossCertificate{law.r_plus, law.r_plus};
        }
        return out;
    }
};

/// Three-component mixtures with uniformly drawn a in [0, alpha],
/// r_minus in [0, 1], r_plus in [C, 1] and Dirichlet(1,1,1) weights.
inline std::vector<TwoPointMixture> random_mixtures(double alpha, double C, std::size_t count, std::uint64_t seed) {
    std::vector<TwoPointMixture> out;
    for (std::size_t m = 0; m < count; ++m) {
        CounterRng rng(seed, Stream::two_point, ~std::uint64_t{0} - m);
        TwoPointMixture mix;
        double total = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double a = alpha * rng.uniform();
            const double rm = rng.uniform();
            const double rp = C + (1.0 - C) * rng.uniform();
            mix.laws.push_back({a, rm, rp});
            mix.weights.push_back(-std::log1p(-rng.uniform()));
            total += mix.weights.back();
        }
        for (auto& w : mix.weights) w /= total;
        out.push_back(std::move(mix));
    }
    return out;
}

/// The law that drives the threshold rule to its bound.
inline TwoPointLaw saturating_law(double alpha, double C) { return {alpha, 0.0, std::min(C + 0.2, 1.0)}; }

inline SimReport run_adoption(const Scenario& s) {
    s.validate();
    if (!(s.C < 1.0)) throw ScenarioError(std::vector<FieldIssue>{{"C", "must lie in [0,1) for adoption"}});
    const double C = s.C;
    const auto rule = scenario_rule(s);
    const double bound = risk_bound(s.u, s.alpha, C);
    const double budget = s.u * s.alpha * (1.0 - C);
    const double worst = lemma_worst_case(rule, s.alpha, C);

    SimReport report{s, s.n_reps, s.seed, {}, {}};
    report.add_metric("risk_bound", bound);
    report.add_metric("budget", budget);
    report.add_metric("lemma_worst_case", worst);

    const auto laws = probe_laws(s.alpha, C);
    double excess = -kInf, exact_max = -kInf;
    for (std::size_t i = 0; i < laws.size(); ++i) {
        const auto sample = adversarial_two_point(laws[i], s.alpha, C, s.n_reps, substream_key(s.seed, Stream::two_point, i));
        const auto est = realized_risk(rule, sample, C);
        excess = std::max(excess, est.mean - bound - 3.0 * est.mc_se);
        exact_max = std::max(exact_max, laws[i].risk(rule, C));
    }
    const auto mixtures = random_mixtures(s.alpha, C, 8, s.seed);
    for (std::size_t m = 0; m < mixtures.size(); ++m) {
        const auto sample = mixtures[m].sample(s.n_reps, substream_key(s.seed, Stream::two_point, laws.size() + 1 + m));
        const auto est = realized_risk(rule, sample, C);
        excess = std::max(excess, est.mean - bound - 3.0 * est.mc_se);
        exact_max = std::max(exact_max, mixtures[m].risk(rule, C));
    }
    report.add_metric("probe_excess_max", excess);
    report.add_metric("probe_exact_risk_max", exact_max);

    report.audit_at_most("lemma_budget", worst, budget + 1e-9);
    report.audit_at_most("two_point_bound", excess, 0.0);
    report.audit_at_most("exact_risk_bound", exact_max, bound + 1e-12);

    if (s.rule == "threshold" && C + 0.2 <= 1.0) {
        const auto law = saturating_law(s.alpha, C);
        const auto sample = adversarial_two_point(law, s.alpha, C, s.n_reps,
                                                  substream_key(s.seed, Stream::two_point, laws.size()));
        const auto est = realized_risk(rule, sample, C);
        report.add_metric("saturation.risk", est.mean, est.mc_se);
        report.audit_at_most("saturation", std::abs(est.mean - bound), 3.0 * est.mc_se);
    }
    return report;
}

} // namespace certdec::sim
