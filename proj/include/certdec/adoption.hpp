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

// The decision-maker's side: when to adopt a certified recommendation over a
// default action of known cost C, and what worst-case risk that implies.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "certdec/core.hpp"
#include "certdec/rng.hpp"

namespace certdec {

inline constexpr std::size_t kDefaultRGridSize = 1001;

/// Uniform grid on [0, 1], with any extra points merged in.
inline std::vector<double> r_grid(std::size_t n = kDefaultRGridSize,
                                  const std::vector<double>& extra = {}) {
    if (n < 2) throw InvalidArgument("r_grid: need at least 2 points");
    return merge_axis(linspace(0.0, 1.0, n), extra);
}

namespace detail {

inline void check_unit(double v, const char* what, bool open_right = false) {
    const bool ok = open_right ? (v >= 0.0 && v < 1.0) : (v >= 0.0 && v <= 1.0);
    if (!ok) throw InvalidArgument(std::string(what) + (open_right ? " outside [0,1)" : " outside [0,1]"));
}

inline void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha outside (0,1)");
}

} // namespace detail

/// Adoption probability q(r) as a function of the reported certificate r,
/// capped at u.
class AdoptionRule {
public:
    using Fn = std::function<double(double)>;

    AdoptionRule(Fn q, double cap_u, std::string name)
        : q_(std::move(q)), cap_(cap_u), name_(std::move(name)) {
        detail::check_unit(cap_, "AdoptionRule: cap u");
        for (double r : r_grid()) {
            const double v = q_(r);
            if (!(v >= 0.0 && v <= cap_)) {
                throw InvalidArgument("AdoptionRule '" + name_ + "': q(" + std::to_string(r) +
                                      ") outside [0, u]");
            }
        }
    }

    double operator()(double r) const { return q_(r); }
    double cap() const { return cap_; }
    const std::string& name() const { return name_; }

    std::vector<double> tabulate(std::span<const double> grid) const {
        std::vector<double> out(grid.size());
        std::transform(grid.begin(), grid.end(), out.begin(), q_);
        return out;
    }

private:
    Fn q_;
    double cap_;
    std::string name_;
};

/// q(r) = u 1(r <= C).
inline AdoptionRule threshold_rule(double C, double u) {
    detail::check_unit(C, "threshold_rule: C", true);
    detail::check_unit(u, "threshold_rule: u");
    return AdoptionRule([C, u](double r) { return r <= C ? u : 0.0; }, u, "threshold");
}

/// q(r) = u for every r.
inline AdoptionRule constant_rule(double u) {
    detail::check_unit(u, "constant_rule: u");
    return AdoptionRule([u](double) { return u; }, u, "constant");
}

/// Worst-case risk C + u alpha (1 - C) of any rule q(r) <= u 1(r <= C).
inline double risk_bound(double u, double alpha, double C) {
    detail::check_unit(u, "risk_bound: u");
    detail::check_alpha(alpha);
    detail::check_unit(C, "risk_bound: C", true);
    return C + u * alpha * (1.0 - C);
}

/// Per-realization term alpha + min(R, C) of the model-specific risk bound
/// under the threshold rule.
inline double pathwise_bound(double R, double C, double alpha) {
    detail::check_unit(R, "pathwise_bound: R");
    detail::check_unit(C, "pathwise_bound: C", true);
    if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("pathwise_bound: alpha outside [0,1)");
    return alpha + std::min(R, C);
}

/// sup over a <= alpha of { a sup_r q(r)(1-C) + (1-a) sup_{r>=C} q(r)(r-C) },
/// with both inner sups taken over r_grid (C is added to the grid). The
/// expression is affine in a, so only a in {0, alpha} is checked.
inline double lemma_worst_case(const AdoptionRule& rule, double alpha, double C,
                               std::span<const double> grid) {
    detail::check_alpha(alpha);
    detail::check_unit(C, "lemma_worst_case: C", true);
    double sup_q = 0.0, sup_excess = 0.0;
    auto visit = [&](double r) {
        const double q = rule(r);
        sup_q = std::max(sup_q, q);
        if (r >= C) sup_excess = std::max(sup_excess, q * (r - C));
    };
    for (double r : grid) visit(r);
    visit(C);
    const double at_alpha = alpha * sup_q * (1.0 - C) + (1.0 - alpha) * sup_excess;
    return std::max(sup_excess, at_alpha);
}

inline double lemma_worst_case(const AdoptionRule& rule, double alpha, double C) {
    const auto grid = r_grid();
    return lemma_worst_case(rule, alpha, C, grid);
}

//---------------------------------------------------------------------------//
// Adversarial two-point laws over (loss, certificate)
//---------------------------------------------------------------------------//

struct LossCertificate {
    double loss;
    double cert;
};

/// Mass a at (L = 1, R = r_minus) and 1 - a at (L = R = r_plus).
struct TwoPointLaw {
    double a;
    double r_minus;
    double r_plus;

    /// Exact risk of the rule under this law against a default of cost C.
    double risk(const AdoptionRule& rule, double C) const {
        const double qm = rule(r_minus), qp = rule(r_plus);
        return a * (qm * 1.0 + (1.0 - qm) * C) + (1.0 - a) * (qp * r_plus + (1.0 - qp) * C);
    }
};

inline std::vector<LossCertificate> adversarial_two_point(const TwoPointLaw& law, double alpha,
                                                          double C, std::size_t n,
                                                          std::uint64_t seed) {
    detail::check_alpha(alpha);
    detail::check_unit(C, "adversarial_two_point: C", true);
    if (!(law.a >= 0.0)) throw InvalidArgument("adversarial_two_point: a must be >= 0");
    if (law.a > alpha) {
        throw InvalidArgument("adversarial_two_point: a > alpha breaks the certificate constraint");
    }
    detail::check_unit(law.r_minus, "adversarial_two_point: r_minus");
    if (!(law.r_plus >= C && law.r_plus <= 1.0)) {
        throw InvalidArgument("adversarial_two_point: r_plus outside [C,1]");
    }
    std::vector<LossCertificate> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        CounterRng rng(seed, Stream::two_point, i);
        out[i] = rng.uniform() < law.a ? LossCertificate{1.0, law.r_minus}
                                       : LossCertificate{law.r_plus, law.r_plus};
    }
    return out;
}

/// Mean and standard error of the expected (over Q) loss q(R) L + (1 - q(R)) C.
struct RiskEstimate {
    double mean;
    double mc_se;
};

inline RiskEstimate realized_risk(const AdoptionRule& rule, std::span<const LossCertificate> sample,
                                  double C) {
    if (sample.empty()) throw InvalidArgument("realized_risk: empty sample");
    double sum = 0.0, sumsq = 0.0;
    for (const auto& s : sample) {
        const double q = rule(s.cert);
        const double v = q * s.loss + (1.0 - q) * C;
        sum += v;
        sumsq += v * v;
    }
    const auto n = static_cast<double>(sample.size());
    const double mean = sum / n;
    const double var = std::max(0.0, sumsq / n - mean * mean);
    return {mean, std::sqrt(var / n)};
}

//---------------------------------------------------------------------------//
// Optimal randomized adoption under a prior
//---------------------------------------------------------------------------//

/// The prior enters only through E[L | R = r] and the marginal of R, both on
/// a sorted grid over [0, 1].
struct PriorSummary {
    std::vector<double> r_grid;
    std::vector<double> cond_mean_loss;
    std::vector<double> marginal;

    void validate() const {
        if (r_grid.empty()) throw InvalidArgument("PriorSummary: empty grid");
        if (cond_mean_loss.size() != r_grid.size() || marginal.size() != r_grid.size()) {
            throw InvalidArgument("PriorSummary: length mismatch");
        }
        double total = 0.0;
        for (std::size_t i = 0; i < r_grid.size(); ++i) {
            if (!(r_grid[i] >= 0.0 && r_grid[i] <= 1.0)) throw InvalidArgument("PriorSummary: r outside [0,1]");
            if (i > 0 && !(r_grid[i] > r_grid[i - 1])) throw InvalidArgument("PriorSummary: grid not increasing");
            if (!(cond_mean_loss[i] >= 0.0 && cond_mean_loss[i] <= 1.0)) {
                throw InvalidArgument("PriorSummary: conditional mean loss outside [0,1]");
            }
            if (!(marginal[i] >= 0.0)) throw InvalidArgument("PriorSummary: negative mass");
            total += marginal[i];
        }
        if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("PriorSummary: masses do not sum to 1");
    }

    /// E[L | R = r] at the largest grid point <= r (first point below the grid).
    double cond_mean_at(double r) const {
        auto it = std::upper_bound(r_grid.begin(), r_grid.end(), r);
        const std::size_t i = it == r_grid.begin() ? 0 : static_cast<std::size_t>(it - r_grid.begin()) - 1;
        return cond_mean_loss[i];
    }
};

/// Bayes excess loss  sum_r q(r) (E[L | R = r] - C) pi_R(r).
inline double adoption_objective(const AdoptionRule& rule, const PriorSummary& prior, double C) {
    double s = 0.0;
    for (std::size_t i = 0; i < prior.r_grid.size(); ++i) {
        s += rule(prior.r_grid[i]) * (prior.cond_mean_loss[i] - C) * prior.marginal[i];
    }
    return s;
}

/// The one-parameter family q_{q*}: adopt with u - q* below C, and above C
/// only where the prior expects a gain, as much as the risk budget allows.
inline AdoptionRule q_family_rule(const PriorSummary& prior, double q_star, double u,
                                  double alpha, double C) {
    auto fn = [prior, q_star, u, alpha, C](double r) {
        double q = r <= C ? u - q_star : 0.0;
        if (r > C && prior.cond_mean_at(r) <= C) {
            const double budget = alpha * (1.0 - C) * q_star / ((1.0 - alpha) * (r - C));
            q += std::min(budget, u - q_star);
        }
        return q;
    };
    return AdoptionRule(std::move(fn), u, "optimal");
}

struct OptimalAdoption {
    AdoptionRule rule;
    double q_star;
    double objective;
};

/// Minimizes the Bayes objective over q* in [0, u] by brute force on a grid of
/// n_search points; ties go to the smallest q*.
inline OptimalAdoption optimal_adoption(const PriorSummary& prior, double u, double alpha,
                                        double C, std::size_t n_search = 1001) {
    prior.validate();
    detail::check_unit(u, "optimal_adoption: u");
    detail::check_alpha(alpha);
    detail::check_unit(C, "optimal_adoption: C", true);
    if (n_search < 1000) throw InvalidArgument("optimal_adoption: search grid must have >= 1000 points");
    double best_q = 0.0, best_obj = kInf;
    for (double q_star : linspace(0.0, u, n_search)) {
        const double obj = adoption_objective(q_family_rule(prior, q_star, u, alpha, C), prior, C);
        if (obj < best_obj) {
            best_obj = obj;
            best_q = q_star;
        }
    }
    return {q_family_rule(prior, best_q, u, alpha, C), best_q, best_obj};
}

} // namespace certdec
