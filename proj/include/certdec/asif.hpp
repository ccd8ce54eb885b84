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

// As-if minimax over a confidence set: pick the action with the smallest
// worst-case loss over the set and report that worst case as a P-certificate.

#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "certdec/confset.hpp"
#include "certdec/core.hpp"

namespace certdec {

namespace detail {

inline void check_grid(const LossSpec& spec, const ParamGrid& grid) {
    if (!grid.empty() && grid.dim() != spec.param_dim()) {
        throw InvalidArgument("grid dimension does not match loss dimension");
    }
}

inline double clamp_bound(const LossSpec& spec, double r) {
    return spec.bounded_unit() ? std::clamp(r, 0.0, 1.0) : r;
}

inline std::vector<std::size_t> members(const ConfidenceSet& cset, const ParamGrid& grid) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (cset.contains(grid[i])) idx.push_back(i);
    }
    return idx;
}

/// argmin over actions of worst[a], lowest index on ties.
inline CertifiedDecision pick_min(const std::vector<double>& worst, double level, bool vacuous) {
    CertifiedDecision d;
    d.action = 0;
    d.risk_bound = worst[0];
    for (std::size_t a = 1; a < worst.size(); ++a) {
        if (worst[a] < d.risk_bound) {
            d.action = a;
            d.risk_bound = worst[a];
        }
    }
    d.kind = PLevel{level};
    d.vacuous = vacuous;
    return d;
}

} // namespace detail

/// sup over grid points in the set of L(a, theta); 0 on an empty set.
inline double worst_case_loss(std::size_t a, const ConfidenceSet& cset, const LossSpec& spec,
                              const ParamGrid& grid) {
    detail::check_grid(spec, grid);
    double worst = 0.0;
    bool any = false;
    for (const auto& p : grid) {
        if (!cset.contains(p)) continue;
        const double v = eval_loss(spec, a, p);
        worst = any ? std::max(worst, v) : v;
        any = true;
    }
    return worst;
}

/// Minimax decision over the grid points inside the set, by enumeration.
inline CertifiedDecision asif_decide(const ConfidenceSet& cset, const LossSpec& spec,
                                     const ParamGrid& grid) {
    detail::check_grid(spec, grid);
    const auto idx = detail::members(cset, grid);
    std::vector<double> worst(spec.num_actions(), 0.0);
    if (!idx.empty()) {
        for (std::size_t a = 0; a < spec.num_actions(); ++a) {
            double w = -kInf;
            for (std::size_t i : idx) w = std::max(w, eval_loss(spec, a, grid[i]));
            worst[a] = w;
        }
    }
    auto d = detail::pick_min(worst, cset.nominal_level(), idx.empty());
    d.risk_bound = detail::clamp_bound(spec, d.risk_bound);
    return d;
}

/// Closed-form worst case over a box-shaped set: 1 - lower(a) for the linear
/// welfare loss, L(a, lower) for a loss decreasing in a scalar parameter.
inline double worst_case_loss_analytic(std::size_t a, const ConfidenceSet& cset,
                                       const LossSpec& spec) {
    if (!cset.box()) throw InvalidArgument("analytic worst case needs a box-shaped set");
    const Box& box = *cset.box();
    if (box.empty()) return 0.0;
    switch (spec.structure()) {
    case LossStructure::linear_welfare:
        return 1.0 - box.lower.at(a);
    case LossStructure::scalar_monotone:
        return spec.raw(a, ParamPoint::scalar(box.lower.at(0)));
    case LossStructure::table:
        break;
    }
    throw InvalidArgument("analytic worst case needs a structured loss");
}

inline CertifiedDecision asif_decide_analytic(const ConfidenceSet& cset, const LossSpec& spec) {
    if (!cset.box()) throw InvalidArgument("analytic as-if decision needs a box-shaped set");
    const bool vacuous = cset.box()->empty();
    std::vector<double> worst(spec.num_actions(), 0.0);
    if (!vacuous) {
        for (std::size_t a = 0; a < spec.num_actions(); ++a) {
            worst[a] = worst_case_loss_analytic(a, cset, spec);
        }
    }
    auto d = detail::pick_min(worst, cset.nominal_level(), vacuous);
    d.risk_bound = detail::clamp_bound(spec, d.risk_bound);
    return d;
}

//---------------------------------------------------------------------------//
// Inference on winners: projection certificates
//---------------------------------------------------------------------------//

struct CriticalValues {
    double unstudentized;
    double studentized;
};

/// Both projection critical values from one seeded set of error draws.
inline CriticalValues projection_critical_values(std::span<const double> sigma,
                                                 const ErrorLaw& law, double alpha,
                                                 std::size_t n_draws, std::uint64_t seed) {
    return {critical_value(sigma, law, alpha, n_draws, seed, false),
            critical_value(sigma, law, alpha, n_draws, seed, true)};
}

struct ProjectionCertificates {
    CertifiedDecision projection;  ///< (argmax X, 1 - (X(d) - c))
    CertifiedDecision studentized; ///< (argmax X, 1 - (X(d) - c* sigma(d)))
    CertifiedDecision risk_aware;  ///< as-if over the studentized box
};

inline std::size_t argmax_lowest(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

inline ProjectionCertificates projection_certificates(const WinnersData& data, double alpha,
                                                      const CriticalValues& cv,
                                                      const LossSpec& spec) {
    data.validate();
    if (spec.structure() != LossStructure::linear_welfare || spec.num_actions() != data.x.size()) {
        throw InvalidArgument("projection_certificates: needs the winners loss over X's actions");
    }
    const double level = 1.0 - alpha;
    const std::size_t ewm = argmax_lowest(data.x);
    ProjectionCertificates out;
    out.projection.action = ewm;
    out.projection.risk_bound = std::clamp(1.0 - (data.x[ewm] - cv.unstudentized), 0.0, 1.0);
    out.projection.kind = PLevel{level};
    out.studentized.action = ewm;
    out.studentized.risk_bound =
        std::clamp(1.0 - (data.x[ewm] - cv.studentized * data.sigma[ewm]), 0.0, 1.0);
    out.studentized.kind = PLevel{level};
    out.risk_aware = asif_decide_analytic(projection_box(data, cv.studentized, true, level), spec);
    return out;
}

/// Convenience form: independent normal errors, critical values from n_draws.
inline ProjectionCertificates projection_certificates(const WinnersData& data, double alpha,
                                                      std::uint64_t seed, std::size_t n_draws) {
    data.validate();
    const auto cv = projection_critical_values(
        data.sigma, ErrorLaw::independent_normal(data.x.size()), alpha, n_draws, seed);
    return projection_certificates(data, alpha, cv, winners_loss(data.x.size()));
}

} // namespace certdec
