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

// Inference on winners: X(a) = theta(a) + sigma(a) Z(a), loss 1 - theta(a).
// Each replication builds the unstudentized and studentized projection
// certificates for the empirical-welfare-maximizing action, the risk-aware
// as-if decision over the studentized box, a trivial certificate, and the
// as-if decisions over the inversions of the trivial and studentized ones.

#pragma once

#include <vector>

#include "certdec/asif.hpp"
#include "certdec/confset.hpp"
#include "certdec/sim/certificates.hpp"
#include "certdec/sim/harness.hpp"

namespace certdec::sim {

inline ErrorLaw error_law(const Scenario& s) {
    return s.correlation.empty() ? ErrorLaw::independent_normal(s.theta.size())
                                 : ErrorLaw::correlated_normal(s.theta.size(), s.correlation);
}

inline CriticalValues winners_critical_values(const Scenario& s) {
    return projection_critical_values(s.sigma, error_law(s), s.alpha, s.n_draws_critval, s.seed);
}

/// Draws X for replication rep.
inline WinnersData draw_winners(const Scenario& s, const ErrorLaw& law, CounterRng& rng) {
    WinnersData data{s.theta, s.sigma};
    std::vector<double> z(s.theta.size());
    law.draw(rng, z);
    for (std::size_t a = 0; a < z.size(); ++a) data.x[a] = s.theta[a] + s.sigma[a] * z[a];
    return data;
}

/// Trivial certificate: action 0 with R = 1 w.p. 1 - alpha, else R = 0,
/// independent of the data.
inline CertifiedDecision trivial_certificate(double alpha, double r_high, CounterRng& rng) {
    CertifiedDecision d;
    d.action = 0;
    d.risk_bound = rng.uniform() < alpha ? 0.0 : r_high;
    d.kind = PLevel{1.0 - alpha};
    return d;
}

inline SimReport run_winners(const Scenario& s, unsigned workers = 1) {
    s.validate();
    if (s.name != ScenarioName::winners) throw InvalidArgument("run_winners: scenario is not winners");
    const ErrorLaw law = error_law(s);
    const CriticalValues cv = winners_critical_values(s);
    const LossSpec spec = winners_loss(s.theta.size());
    const ParamGrid no_grid;
    const double level = 1.0 - s.alpha;
    const ParamPoint theta(s.theta);

    Layout layout;
    const std::size_t cov_proj = layout.add("projection.coverage_rate", ColumnKind::rate);
    const std::size_t cov_stud = layout.add("coverage_rate", ColumnKind::rate);
    const auto primary = add_cert_columns(layout, "");
    const auto proj = add_cert_columns(layout, "projection.");
    const auto stud = add_cert_columns(layout, "studentized.");
    const auto triv = add_cert_columns(layout, "trivial.");
    const auto inv_triv = add_cert_columns(layout, "inversion_trivial.");
    const auto inv_stud = add_cert_columns(layout, "inversion_studentized.");
    const std::size_t dom = layout.add("dominance_violations", ColumnKind::count);
    const std::size_t differ = layout.add("action_differs_count", ColumnKind::count);
    const std::size_t inv_triv_viol = layout.add("inversion_trivial.dominance_violations", ColumnKind::count);
    const std::size_t inv_stud_viol = layout.add("inversion_studentized.dominance_violations", ColumnKind::count);

    auto rep_fn = [&](std::size_t rep, std::span<double> row) {
        CounterRng rng(s.seed, Stream::replication, rep);
        const WinnersData data = draw_winners(s, law, rng);
        const auto certs = projection_certificates(data, s.alpha, cv, spec);
        const auto loss = [&](const CertifiedDecision& d) { return 1.0 - s.theta[d.action]; };

        row[cov_proj] = projection_box(data, cv.unstudentized, false, level).contains(theta);
        row[cov_stud] = projection_box(data, cv.studentized, true, level).contains(theta);

        record_cert(row, primary, loss(certs.risk_aware), certs.risk_aware.risk_bound, s.C, s.u, s.alpha);
        record_cert(row, proj, loss(certs.projection), certs.projection.risk_bound, s.C, s.u, s.alpha);
        record_cert(row, stud, loss(certs.studentized), certs.studentized.risk_bound, s.C, s.u, s.alpha);

        CounterRng crng(s.seed, Stream::challenger, rep);
        const auto trivial = trivial_certificate(s.alpha, 1.0, crng);
        record_cert(row, triv, loss(trivial), trivial.risk_bound, s.C, s.u, s.alpha);

        const auto by_triv = asif_decide_analytic(
            invert_certificate(trivial.action, trivial.risk_bound, spec, no_grid, level), spec);
        record_cert(row, inv_triv, loss(by_triv), by_triv.risk_bound, s.C, s.u, s.alpha);
        row[inv_triv_viol] = by_triv.risk_bound > trivial.risk_bound;

        const auto by_stud = asif_decide_analytic(
            invert_certificate(certs.studentized.action, certs.studentized.risk_bound, spec, no_grid, level),
            spec);
        record_cert(row, inv_stud, loss(by_stud), by_stud.risk_bound, s.C, s.u, s.alpha);
        row[inv_stud_viol] = by_stud.risk_bound > certs.studentized.risk_bound;

        row[dom] = certs.risk_aware.risk_bound > certs.studentized.risk_bound;
        row[differ] = certs.risk_aware.action != certs.studentized.action;
    };
    const Accumulator acc = run_replications(layout.size(), s.n_reps, workers, rep_fn);

    SimReport report{s, s.n_reps, s.seed, {}, {}};
    report.add_metric("critical_value", cv.unstudentized);
    report.add_metric("critical_value_studentized", cv.studentized);
    export_columns(layout, acc, report);

    const double tol = nominal_tolerance(level, acc.n());
    report.audit_at_least("projection.coverage", acc.mean(cov_proj), level - tol);
    report.audit_at_least("coverage", acc.mean(cov_stud), level - tol);
    for (const auto* c : {&primary, &proj, &stud, &triv, &inv_triv, &inv_stud}) {
        audit_cert(report, acc, *c, s.alpha, s.C, s.u, true);
    }
    report.audit_at_most("risk_aware_le_studentized", acc.sum(dom), 0.0);
    report.audit_at_most("inversion_trivial.dominance", acc.sum(inv_triv_viol), 0.0);
    report.audit_at_most("inversion_studentized.dominance", acc.sum(inv_stud_viol), 0.0);
    return report;
}

} // namespace certdec::sim
