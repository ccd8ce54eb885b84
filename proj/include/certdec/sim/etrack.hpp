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

// E-certificates for a normal mean known to lie on a finite grid: with
// likelihood-ratio e-values the analyst guesses a grid point or hedges, and
// reports the bound max_theta L / E. Also covers the truncated gamma E + 1
// variant and inversion of e-certified challengers.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "certdec/ecert.hpp"
#include "certdec/sim/harness.hpp"

namespace certdec::sim {

inline constexpr double kHitLoss = 0.1;
inline constexpr double kMissLoss = 1.5;
inline constexpr double kHedgeLoss = 0.6;

inline ParamGrid etrack_grid(const Scenario& s) { return ParamGrid::line(s.theta_points, "theta"); }

/// Actions guess[i] (loss 0.1 at theta_i, 1.5 elsewhere) and hedge (0.6).
inline LossSpec etrack_loss(const ParamGrid& grid) {
    const std::size_t k = grid.size();
    std::vector<std::vector<double>> table(k + 1, std::vector<double>(k, kMissLoss));
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < k; ++i) {
        table[i][i] = kHitLoss;
        labels.push_back("guess[" + std::to_string(i) + "]");
    }
    std::fill(table[k].begin(), table[k].end(), kHedgeLoss);
    labels.push_back("hedge");
    return table_loss(grid, std::move(table), std::move(labels));
}

inline std::size_t grid_index(const ParamGrid& grid, double t) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i][0] == t) return i;
    }
    throw InvalidArgument("grid_index: value not on the grid");
}

inline SimReport run_etrack(const Scenario& s, unsigned workers = 1) {
    s.validate();
    if (s.name != ScenarioName::etrack) throw InvalidArgument("run_etrack: scenario is not etrack");
    const ParamGrid grid = etrack_grid(s);
    const LossSpec spec = etrack_loss(grid);
    const std::size_t truth = grid_index(grid, s.theta[0]);
    const std::size_t hedge = grid.size();
    const double C = s.C;
    const double gamma = s.gamma.value_or(0.0);

    Layout layout;
    const std::size_t e_true = layout.add("e_value_mean", ColumnKind::mean);
    const std::size_t ratio = layout.add("e_ratio_mean", ColumnKind::mean);
    const std::size_t ratio_cap = layout.add("e_ratio_max1_mean", ColumnKind::mean);
    const std::size_t nonpos = layout.add("nonpositive_R", ColumnKind::count);
    const std::size_t mean_R = layout.add("mean_R", ColumnKind::mean);
    const std::size_t adopt = layout.add("adoption_rate", ColumnKind::rate);
    const std::size_t realized = layout.add("mean_realized_risk", ColumnKind::mean);
    const std::size_t self_viol = layout.add("inversion_self.dominance_violations", ColumnKind::count);
    const std::size_t hedge_R = layout.add("inversion_hedge.challenger_mean_R", ColumnKind::mean);
    const std::size_t hedge_ratio = layout.add("inversion_hedge.challenger_e_ratio_mean", ColumnKind::mean);
    const std::size_t hedge_viol = layout.add("inversion_hedge.dominance_violations", ColumnKind::count);
    std::size_t t_ratio = 0, t_cap = 0, t_adopt = 0, t_realized = 0;
    if (s.gamma) {
        t_ratio = layout.add("truncated.e_ratio_mean", ColumnKind::mean);
        t_cap = layout.add("truncated.e_ratio_max1_mean", ColumnKind::mean);
        t_adopt = layout.add("truncated.adoption_rate", ColumnKind::rate);
        t_realized = layout.add("truncated.mean_realized_risk", ColumnKind::mean);
    }

    auto adopted_risk = [&](double loss, double R) {
        const double q = R <= C ? s.u : 0.0;
        return q * loss + (1.0 - q) * C;
    };

    auto rep_fn = [&](std::size_t rep, std::span<double> row) {
        CounterRng rng(s.seed, Stream::replication, rep);
        std::normal_distribution<double> nd;
        const double x = s.theta[0] + s.sigma[0] * nd(rng);
        const auto field = likelihood_ratio_field(grid, x, s.sigma[0]);
        row[e_true] = field.values[truth];

        const auto d = eposterior_decide(field, spec, grid);
        const double loss = spec.raw(d.action, grid[truth]);
        const double r = ext_div(loss, d.risk_bound);
        row[ratio] = r;
        row[ratio_cap] = std::max(r, 1.0);
        row[nonpos] = !(d.risk_bound > 0.0);
        row[mean_R] = d.risk_bound;
        row[adopt] = d.risk_bound <= C;
        row[realized] = adopted_risk(loss, d.risk_bound);

        if (d.risk_bound > 0.0 && std::isfinite(d.risk_bound)) {
            const auto again = eposterior_decide(invert_e_certificate(d.action, d.risk_bound, spec, grid), spec, grid);
            row[self_viol] = again.risk_bound > d.risk_bound;
        }

        double r_hedge = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            r_hedge = std::max(r_hedge, ext_div(spec.raw(hedge, grid[i]), field.values[i]));
        }
        row[hedge_R] = r_hedge;
        row[hedge_ratio] = ext_div(kHedgeLoss, r_hedge);
        if (r_hedge > 0.0 && std::isfinite(r_hedge)) {
            const auto inv = eposterior_decide(invert_e_certificate(hedge, r_hedge, spec, grid), spec, grid);
            row[hedge_viol] = inv.risk_bound > r_hedge;
        }

        if (s.gamma) {
            const auto t = truncated_eposterior_decide(field, gamma, spec, grid);
            const double tl = spec.raw(t.action, grid[truth]);
            const double tr = ext_div(tl, t.risk_bound);
            row[t_ratio] = tr;
            row[t_cap] = std::max(tr, 1.0);
            row[t_adopt] = t.risk_bound <= C;
            row[t_realized] = adopted_risk(tl, t.risk_bound);
        }
    };
    const Accumulator acc = run_replications(layout.size(), s.n_reps, workers, rep_fn);

    SimReport report{s, s.n_reps, s.seed, {}, {}};
    export_columns(layout, acc, report);
    auto at_most_mean = [&](const std::string& name, std::size_t col, double limit) {
        report.audit_at_most(name, acc.mean(col), limit + 3.0 * acc.mean_se(col));
    };
    at_most_mean("e_certificate", ratio, 1.0);
    report.audit_at_most("positive_R", acc.sum(nonpos), 0.0);
    at_most_mean("post_adoption_risk", realized, e_adoption_risk_factor(1.0, C));
    report.audit_at_most("inversion_self.pathwise_dominance", acc.sum(self_viol), 0.0);
    at_most_mean("inversion_hedge.challenger_certified", hedge_ratio, 1.0);
    report.audit_at_most("inversion_hedge.pathwise_dominance", acc.sum(hedge_viol), 0.0);
    if (s.gamma) {
        at_most_mean("truncated.e_certificate", t_cap, 1.0 + gamma);
        at_most_mean("truncated.post_adoption_risk", t_realized, e_adoption_risk_factor(gamma, C));
    }
    return report;
}

} // namespace certdec::sim
