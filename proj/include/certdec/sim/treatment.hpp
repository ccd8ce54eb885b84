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

// Choosing a treatment proportion: X ~ N(theta, sigma^2), loss
// a (1 - theta) + psi(a) over fractions a in [action_min, 1], default cost
// (1 - rho) - kappa. The analyst as-if optimizes against the uniformly most
// accurate lower bound [X + sigma z_alpha, 1].

#pragma once

#include <random>

#include "certdec/asif.hpp"
#include "certdec/confset.hpp"
#include "certdec/sim/certificates.hpp"
#include "certdec/sim/harness.hpp"

namespace certdec::sim {

inline LossSpec treatment_spec(const Scenario& s) {
    return treatment_loss(s.treatment_fractions(), s.psi, 0.0, 1.0);
}

/// min_a L(a, t).
inline double min_loss_at(const LossSpec& spec, double t) {
    double m = kInf;
    const auto p = ParamPoint::scalar(t);
    for (std::size_t a = 0; a < spec.num_actions(); ++a) m = std::min(m, spec.raw(a, p));
    return m;
}

/// The theta at which min_a L(a, theta) crosses C, by bisection on [lo, hi]
/// to within tol; requires min_a L(a, lo) >= C >= min_a L(a, hi).
inline double adoption_threshold(const LossSpec& spec, double C, double lo = 0.0, double hi = 1.0,
                                 double tol = 1e-12) {
    if (min_loss_at(spec, lo) < C || min_loss_at(spec, hi) > C) {
        throw InvalidArgument("adoption_threshold: C is not bracketed on [lo, hi]");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (min_loss_at(spec, mid) > C ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double draw_scalar(const Scenario& s, CounterRng& rng) {
    std::normal_distribution<double> nd;
    return s.theta[0] + s.sigma[0] * nd(rng);
}

inline SimReport run_treatment(const Scenario& s, unsigned workers = 1) {
    s.validate();
    if (s.name != ScenarioName::treatment) throw InvalidArgument("run_treatment: scenario is not treatment");
    const LossSpec spec = treatment_spec(s);
    const double C = s.effective_C();
    const double level = 1.0 - s.alpha;
    const double theta = s.theta[0];
    const double sigma = s.sigma[0];
    const double theta_bar = adoption_threshold(spec, C);
    const ParamPoint theta_pt = ParamPoint::scalar(theta);

    Layout layout;
    const std::size_t cover = layout.add("coverage_rate", ColumnKind::rate);
    const auto primary = add_cert_columns(layout, "");
    const std::size_t mismatch = layout.add("adoption_threshold_mismatches", ColumnKind::count);
    const std::size_t vacuous = layout.add("vacuous_rate", ColumnKind::rate);

    auto rep_fn = [&](std::size_t rep, std::span<double> row) {
        CounterRng rng(s.seed, Stream::replication, rep);
        const double x = draw_scalar(s, rng);
        const double theta_hat = uma_lower_bound(x, sigma, s.alpha);
        const auto cset = uma_lower_set(theta_hat, 0.0, 1.0, level);
        const auto d = asif_decide_analytic(cset, spec);
        row[cover] = cset.contains(theta_pt);
        record_cert(row, primary, spec.raw(d.action, theta_pt), d.risk_bound, C, s.u, s.alpha);
        row[mismatch] = (d.risk_bound <= C) != (theta_hat > theta_bar);
        row[vacuous] = d.vacuous;
    };
    const Accumulator acc = run_replications(layout.size(), s.n_reps, workers, rep_fn);

    SimReport report{s, s.n_reps, s.seed, {}, {}};
    report.add_metric("C", C);
    report.add_metric("theta_bar", theta_bar);
    report.add_metric("full_info_R", min_loss_at(spec, theta));
    export_columns(layout, acc, report);

    report.audit_at_least("coverage", acc.mean(cover), level - nominal_tolerance(level, acc.n()));
    audit_cert(report, acc, primary, s.alpha, C, s.u, spec.bounded_unit());
    report.audit_at_most("adoption_threshold", acc.sum(mismatch), 0.0);
    return report;
}

} // namespace certdec::sim
