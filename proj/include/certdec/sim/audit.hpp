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

// Dominance audit: given any P-certified challenger (delta~, R~), invert it
// into a confidence set, as-if optimize against that set, and compare the
// resulting certificate R with R~ replication by replication and in upper-tail
// probability. For treatment scenarios the uniformly-most-accurate as-if
// certificate is also compared with the challenger above R(theta).

#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "certdec/asif.hpp"
#include "certdec/confset.hpp"
#include "certdec/sim/harness.hpp"
#include "certdec/sim/treatment.hpp"
#include "certdec/sim/winners.hpp"

namespace certdec::sim {

struct Observation {
    std::span<const double> x;
    std::span<const double> sigma;
};

struct ChallengerDraw {
    std::size_t action;
    double risk_bound;
};

/// A certified-decision rule under audit. It may randomize through the rng,
/// which is a per-replication stream.
using Challenger = std::function<ChallengerDraw(const Observation&, CounterRng&)>;

/// Largest loss over the parameter space, which a trivial certificate reports.
inline double max_loss(const Scenario& s) {
    if (s.name == ScenarioName::winners) return 1.0;
    const auto spec = treatment_spec(s);
    double m = 0.0;
    for (std::size_t a = 0; a < spec.num_actions(); ++a) m = std::max(m, spec.raw(a, ParamPoint::scalar(0.0)));
    return m;
}

/// Challengers shipped with the tool: trivial, studentized (winners) and self
/// (the scenario's own as-if decision).
inline Challenger make_challenger(const Scenario& s, std::string_view name) {
    const double level = 1.0 - s.alpha;
    if (name == "trivial") {
        const double high = max_loss(s);
        const double alpha = s.alpha;
        return [alpha, high](const Observation&, CounterRng& rng) {
            const auto d = trivial_certificate(alpha, high, rng);
            return ChallengerDraw{d.action, d.risk_bound};
        };
    }
    if (s.name == ScenarioName::winners) {
        const auto cv = winners_critical_values(s);
        const auto spec = winners_loss(s.theta.size());
        const double alpha = s.alpha;
        if (name == "studentized" || name == "self") {
            const bool self = name == "self";
            return [cv, spec, alpha, self](const Observation& obs, CounterRng&) {
                WinnersData data{{obs.x.begin(), obs.x.end()}, {obs.sigma.begin(), obs.sigma.end()}};
                const auto certs = projection_certificates(data, alpha, cv, spec);
                const auto& d = self ? certs.risk_aware : certs.studentized;
                return ChallengerDraw{d.action, d.risk_bound};
            };
        }
    } else if (s.name == ScenarioName::treatment && name == "self") {
        const auto spec = treatment_spec(s);
        const double alpha = s.alpha;
        return [spec, alpha, level](const Observation& obs, CounterRng&) {
            const double hat = uma_lower_bound(obs.x[0], obs.sigma[0], alpha);
            const auto d = asif_decide_analytic(uma_lower_set(hat, 0.0, 1.0, level), spec);
            return ChallengerDraw{d.action, d.risk_bound};
        };
    }
    throw InvalidArgument("no challenger '" + std::string(name) + "' for scenario " + to_string(s.name));
}

namespace detail {

struct TailColumns {
    std::vector<double> thresholds;
    std::size_t first = 0;
};

inline TailColumns add_tail_columns(Layout& layout, const std::string& prefix, std::vector<double> r) {
    TailColumns t{std::move(r), layout.size()};
    for (std::size_t k = 0; k < t.thresholds.size(); ++k) {
        layout.add(prefix + "tail_diff[" + std::to_string(k) + "]", ColumnKind::mean, false);
    }
    return t;
}

inline void record_tail(std::span<double> row, const TailColumns& t, double R, double R_tilde) {
    for (std::size_t k = 0; k < t.thresholds.size(); ++k) {
        const double r = t.thresholds[k];
        row[t.first + k] = static_cast<double>(R >= r) - static_cast<double>(R_tilde >= r);
    }
}

/// max_k P(R >= r_k) - P(R~ >= r_k), and the same less 3 MC-SE per threshold.
inline void report_tail(SimReport& report, const Accumulator& acc, const TailColumns& t,
                        const std::string& prefix) {
    double stat = -kInf, excess = -kInf;
    for (std::size_t k = 0; k < t.thresholds.size(); ++k) {
        const double m = acc.mean(t.first + k);
        stat = std::max(stat, m);
        excess = std::max(excess, m - 3.0 * acc.mean_se(t.first + k));
    }
    report.add_metric(prefix + "tail_stat_max", stat);
    report.add_metric(prefix + "tail_excess_max", excess);
}

} // namespace detail

inline SimReport run_dominance_audit(const Scenario& s, const Challenger& challenger,
                                     unsigned workers = 1) {
    s.validate();
    if (s.name == ScenarioName::etrack) throw InvalidArgument("run_dominance_audit: P-certificate scenarios only");
    const bool winners = s.name == ScenarioName::winners;
    const LossSpec spec = winners ? winners_loss(s.theta.size()) : treatment_spec(s);
    // Winners inversions are boxes built without a grid; treatment inversions
    // read the parameter interval off a grid spanning [0, 1].
    const ParamGrid theta_grid = winners ? ParamGrid() : ParamGrid::line({0.0, 1.0}, "theta");
    const ErrorLaw law = winners ? error_law(s) : ErrorLaw::independent_normal(1);
    const double level = 1.0 - s.alpha;
    const ParamPoint theta(s.theta);
    const double r_max = max_loss(s);

    Layout layout;
    const std::size_t valid = layout.add("challenger.cert_valid_rate", ColumnKind::rate);
    const std::size_t r_tilde = layout.add("challenger.mean_R", ColumnKind::mean);
    const std::size_t r_inv = layout.add("inversion.mean_R", ColumnKind::mean);
    const std::size_t viol = layout.add("inversion.dominance_violations", ColumnKind::count);
    const auto inv_tail = detail::add_tail_columns(layout, "inversion.", linspace(0.0, r_max, 101));

    double r_theta = 0.0;
    std::size_t r_uma = 0;
    detail::TailColumns uma_tail;
    if (!winners) {
        r_theta = min_loss_at(spec, s.theta[0]);
        std::vector<double> above(101);
        for (std::size_t k = 0; k < above.size(); ++k) {
            above[k] = r_theta + (r_max - r_theta) * static_cast<double>(k + 1) / 101.0;
        }
        r_uma = layout.add("uma.mean_R", ColumnKind::mean);
        uma_tail = detail::add_tail_columns(layout, "uma.", std::move(above));
    }

    auto rep_fn = [&](std::size_t rep, std::span<double> row) {
        CounterRng rng(s.seed, Stream::replication, rep);
        std::vector<double> x;
        if (winners) {
            x = draw_winners(s, law, rng).x;
        } else {
            x = {draw_scalar(s, rng)};
        }
        CounterRng crng(s.seed, Stream::challenger, rep);
        const auto ch = challenger(Observation{x, s.sigma}, crng);
        if (ch.action >= spec.num_actions()) throw InvalidArgument("challenger returned an invalid action");
        row[valid] = spec.raw(ch.action, theta) <= ch.risk_bound;
        row[r_tilde] = ch.risk_bound;

        const auto d = asif_decide_analytic(
            invert_certificate(ch.action, ch.risk_bound, spec, theta_grid, level), spec);
        row[r_inv] = d.risk_bound;
        row[viol] = d.risk_bound > ch.risk_bound;
        detail::record_tail(row, inv_tail, d.risk_bound, ch.risk_bound);

        if (!winners) {
            const double hat = uma_lower_bound(x[0], s.sigma[0], s.alpha);
            const auto u = asif_decide_analytic(uma_lower_set(hat, 0.0, 1.0, level), spec);
            row[r_uma] = u.risk_bound;
            detail::record_tail(row, uma_tail, u.risk_bound, ch.risk_bound);
        }
    };
    const Accumulator acc = run_replications(layout.size(), s.n_reps, workers, rep_fn);

    SimReport report{s, s.n_reps, s.seed, {}, {}};
    export_columns(layout, acc, report);
    detail::report_tail(report, acc, inv_tail, "inversion.");
    if (!winners) {
        report.add_metric("uma.R_theta", r_theta);
        detail::report_tail(report, acc, uma_tail, "uma.");
    }

    report.audit_at_least("challenger_certified", acc.mean(valid), level - nominal_tolerance(level, acc.n()));
    if (!report.audits.back().passed) {
        report.add_metric("dominance_claim_suppressed", 1.0);
        return report;
    }
    report.audit_at_most("inversion.pathwise_dominance", acc.sum(viol), 0.0);
    report.audit_at_most("inversion.tail_dominance", report.metric("inversion.tail_excess_max").value, 0.0);
    if (!winners) {
        report.audit_at_most("uma.tail_dominance", report.metric("uma.tail_excess_max").value, 0.0);
    }
    return report;
}

inline SimReport run_dominance_audit(const Scenario& s, unsigned workers = 1) {
    s.validate();
    return run_dominance_audit(s, make_challenger(s, s.challenger), workers);
}

} // namespace certdec::sim
