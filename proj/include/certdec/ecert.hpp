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

// E-certified decisions: minimax of e-posterior weighted loss, the inversion
// that shows such decisions are essentially complete, and the truncated
// variant E_gamma = gamma E + 1 with its post-adoption risk factor.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "certdec/asif.hpp"
#include "certdec/core.hpp"
#include "certdec/normal.hpp"

namespace certdec {

/// Realized e-values E(Y, theta) for the observed Y, one per grid point.
struct EVariableField {
    std::vector<double> values;
    std::string label;

    void validate(const ParamGrid& grid) const {
        if (values.size() != grid.size()) throw InvalidArgument("EVariableField: size != grid size");
        for (double v : values) {
            if (std::isnan(v) || v < 0.0) throw InvalidArgument("EVariableField: values must be >= 0");
        }
    }
};

namespace detail {

inline CertifiedDecision eposterior_minimax(const std::vector<double>& e, const LossSpec& spec,
                                            const ParamGrid& grid, double multiple) {
    if (!spec.positive()) throw InvalidArgument("E-posterior decisions need a positive loss");
    check_grid(spec, grid);
    CertifiedDecision best;
    best.kind = EMultiple{multiple};
    best.risk_bound = kInf;
    for (std::size_t a = 0; a < spec.num_actions(); ++a) {
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            worst = std::max(worst, ext_div(eval_loss(spec, a, grid[i]), e[i]));
        }
        if (a == 0 || worst < best.risk_bound) {
            best.action = a;
            best.risk_bound = worst;
        }
    }
    best.vacuous = grid.empty();
    return best;
}

} // namespace detail

/// argmin_a max_theta L(a, theta) / E(theta), with positive / 0 = inf.
inline CertifiedDecision eposterior_decide(const EVariableField& field, const LossSpec& spec,
                                           const ParamGrid& grid) {
    field.validate(grid);
    return detail::eposterior_minimax(field.values, spec, grid, 1.0);
}

/// E(theta) = L(delta_tilde, theta) / R_tilde; re-deciding with it never
/// returns a bound above R_tilde.
inline EVariableField invert_e_certificate(std::size_t delta_tilde, double r_tilde,
                                           const LossSpec& spec, const ParamGrid& grid) {
    if (!(r_tilde > 0.0)) throw InvalidArgument("invert_e_certificate: R_tilde must be > 0");
    if (std::isinf(r_tilde)) throw InvalidArgument("invert_e_certificate: R_tilde must be finite");
    if (delta_tilde >= spec.num_actions()) {
        throw InvalidArgument("invert_e_certificate: action index out of range");
    }
    detail::check_grid(spec, grid);
    EVariableField field;
    field.label = "inverted(" + spec.action_label(delta_tilde) + ")";
    field.values.reserve(grid.size());
    for (const auto& p : grid) {
        const double loss = eval_loss(spec, delta_tilde, p);
        double e = loss / r_tilde;
        // Round up until loss / e <= R_tilde holds in floating point.
        while (ext_div(loss, e) > r_tilde) e = std::nextafter(e, kInf);
        field.values.push_back(e);
    }
    return field;
}

/// Decision against E_gamma = gamma E + 1, certified at multiple 1 + gamma.
inline CertifiedDecision truncated_eposterior_decide(const EVariableField& field, double gamma,
                                                     const LossSpec& spec,
                                                     const ParamGrid& grid) {
    field.validate(grid);
    if (!(gamma > 0.0) || std::isinf(gamma)) {
        throw InvalidArgument("truncated_eposterior_decide: gamma must be finite and > 0");
    }
    std::vector<double> e(field.values.size());
    std::transform(field.values.begin(), field.values.end(), e.begin(),
                   [gamma](double v) { return gamma * v + 1.0; });
    return detail::eposterior_minimax(e, spec, grid, 1.0 + gamma);
}

/// Post-adoption worst-case expected loss (1 + gamma) C for any adoption
/// Q <= 1(R <= C); gamma = 1 is the untruncated 2C.
inline double e_adoption_risk_factor(double gamma, double C) {
    if (!(gamma >= 0.0) || std::isinf(gamma)) throw InvalidArgument("e_adoption_risk_factor: gamma must be >= 0");
    if (!(C > 0.0)) throw InvalidArgument("e_adoption_risk_factor: C must be > 0");
    return (1.0 + gamma) * C;
}

/// Likelihood-ratio e-values for a normal mean on a scalar grid: for each
/// theta, the average over the other grid points theta' of
/// phi((x - theta') / sigma) / phi((x - theta) / sigma). Each ratio has mean
/// exactly 1 under theta, and so does the average.
inline EVariableField likelihood_ratio_field(const ParamGrid& grid, double x, double sigma) {
    if (grid.dim() != 1 || grid.size() < 2) {
        throw InvalidArgument("likelihood_ratio_field: needs a scalar grid with >= 2 points");
    }
    if (!(sigma > 0.0)) throw InvalidArgument("likelihood_ratio_field: sigma must be > 0");
    const std::size_t n = grid.size();
    std::vector<double> logp(n);
    for (std::size_t i = 0; i < n; ++i) logp[i] = normal_log_pdf(x, grid[i][0], sigma);
    EVariableField field;
    field.label = "likelihood_ratio";
    field.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) s += std::exp(logp[j] - logp[i]);
        }
        field.values[i] = s / static_cast<double>(n - 1);
    }
    return field;
}

} // namespace certdec
