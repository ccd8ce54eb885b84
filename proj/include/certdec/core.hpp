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

// Domain types shared by every module: parameter points and grids, losses,
// and the certified-decision record.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace certdec {

/// Raised when an argument violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an evaluation produces a value outside the declared domain
/// (NaN loss, a bounded loss leaving [0,1], ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Division on the extended nonnegative reals: x/0 = inf for x > 0,
/// 0/0 = 0, finite/inf = 0. Never returns NaN for nonnegative inputs.
inline double ext_div(double num, double den) {
    if (den == 0.0) return num > 0.0 ? kInf : 0.0;
    if (std::isinf(den)) return std::isinf(num) ? kInf : 0.0;
    return num / den;
}

//---------------------------------------------------------------------------//
// Parameter space
//---------------------------------------------------------------------------//

struct ParamPoint {
    std::vector<double> coords;

    ParamPoint() = default;
    explicit ParamPoint(std::vector<double> c) : coords(std::move(c)) {
        for (double v : coords) {
            if (!std::isfinite(v)) throw InvalidArgument("ParamPoint: non-finite coordinate");
        }
    }
    static ParamPoint scalar(double v) { return ParamPoint({v}); }

    std::size_t dim() const { return coords.size(); }
    double operator[](std::size_t i) const { return coords[i]; }

    friend bool operator==(const ParamPoint&, const ParamPoint&) = default;
};

/// Evenly spaced points on [lo, hi]; n >= 2 includes both endpoints.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    out.back() = hi;
    return out;
}

/// Sorted union of an axis with extra points.
inline std::vector<double> merge_axis(std::vector<double> axis, const std::vector<double>& extra) {
    axis.reserve(axis.size() + extra.size());
    for (double v : extra) axis.push_back(v);
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    return axis;
}

/// Finite, duplicate-free, ordered set of parameter points standing in for
/// the parameter space. May be empty.
class ParamGrid {
public:
    ParamGrid() = default;

    ParamGrid(std::vector<ParamPoint> points, std::string label)
        : points_(std::move(points)), label_(std::move(label)) {
        if (points_.empty()) return;
        dim_ = points_.front().dim();
        for (const auto& p : points_) {
            if (p.dim() != dim_) throw InvalidArgument("ParamGrid: mixed dimensions");
        }
        std::vector<std::size_t> order(points_.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return points_[a].coords < points_[b].coords;
        });
        for (std::size_t i = 1; i < order.size(); ++i) {
            if (points_[order[i]] == points_[order[i - 1]]) {
                throw InvalidArgument("ParamGrid: duplicate point");
            }
        }
    }

    /// Cartesian product of per-coordinate axes, last coordinate fastest.
    static ParamGrid product(const std::vector<std::vector<double>>& axes, std::string label) {
        std::vector<ParamPoint> pts;
        if (axes.empty()) return ParamGrid(std::move(pts), std::move(label));
        std::size_t total = 1;
        for (const auto& ax : axes) total *= ax.size();
        pts.reserve(total);
        std::vector<std::size_t> idx(axes.size(), 0);
        for (std::size_t n = 0; n < total; ++n) {
            std::vector<double> c(axes.size());
            for (std::size_t d = 0; d < axes.size(); ++d) c[d] = axes[d][idx[d]];
            pts.emplace_back(std::move(c));
            for (std::size_t d = axes.size(); d-- > 0;) {
                if (++idx[d] < axes[d].size()) break;
                idx[d] = 0;
            }
        }
        return ParamGrid(std::move(pts), std::move(label));
    }

    static ParamGrid line(const std::vector<double>& values, std::string label) {
        std::vector<ParamPoint> pts;
        pts.reserve(values.size());
        for (double v : values) pts.push_back(ParamPoint::scalar(v));
        return ParamGrid(std::move(pts), std::move(label));
    }

    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    std::size_t dim() const { return dim_; }
    const std::string& label() const { return label_; }
    const ParamPoint& operator[](std::size_t i) const { return points_[i]; }
    auto begin() const { return points_.begin(); }
    auto end() const { return points_.end(); }

private:
    std::vector<ParamPoint> points_;
    std::string label_;
    std::size_t dim_ = 0;
};

//---------------------------------------------------------------------------//
// Losses
//---------------------------------------------------------------------------//

/// Analytic structure a loss may advertise to enable closed-form paths.
enum class LossStructure {
    table,           ///< arbitrary values, grid lookup only
    linear_welfare,  ///< L(a, theta) = 1 - theta(a)
    scalar_monotone, ///< scalar theta, L(a, .) weakly decreasing
};

class LossSpec {
public:
    using Fn = std::function<double(std::size_t, const ParamPoint&)>;

    LossSpec(std::vector<std::string> actions, std::size_t param_dim, Fn fn,
             bool bounded_unit, bool positive, LossStructure structure)
        : actions_(std::move(actions)), param_dim_(param_dim), fn_(std::move(fn)),
          bounded_unit_(bounded_unit), positive_(positive), structure_(structure) {
        if (actions_.empty()) throw InvalidArgument("LossSpec: empty action set");
    }

    std::size_t num_actions() const { return actions_.size(); }
    const std::string& action_label(std::size_t a) const { return actions_.at(a); }
    std::size_t param_dim() const { return param_dim_; }
    bool bounded_unit() const { return bounded_unit_; }
    bool positive() const { return positive_; }
    LossStructure structure() const { return structure_; }

    /// Unchecked evaluation; prefer eval_loss outside hot loops.
    double raw(std::size_t a, const ParamPoint& theta) const { return fn_(a, theta); }

private:
    std::vector<std::string> actions_;
    std::size_t param_dim_;
    Fn fn_;
    bool bounded_unit_;
    bool positive_;
    LossStructure structure_;
};

/// L(a, theta), with the declared flags enforced.
inline double eval_loss(const LossSpec& spec, std::size_t a, const ParamPoint& theta) {
    if (a >= spec.num_actions()) throw InvalidArgument("eval_loss: action index out of range");
    if (theta.dim() != spec.param_dim()) {
        throw InvalidArgument("eval_loss: parameter dimension " + std::to_string(theta.dim()) +
                              " does not match loss dimension " +
                              std::to_string(spec.param_dim()));
    }
    const double v = spec.raw(a, theta);
    if (std::isnan(v)) throw DomainError("eval_loss: NaN loss");
    if (spec.bounded_unit() && (v < 0.0 || v > 1.0)) {
        throw DomainError("eval_loss: bounded loss outside [0,1]");
    }
    if (spec.positive() && !(v > 0.0)) throw DomainError("eval_loss: positive loss is not > 0");
    return v;
}

/// L(a, theta) = 1 - theta(a): outcome maximization over n actions, theta in [0,1]^n.
inline LossSpec winners_loss(std::size_t n_actions) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n_actions; ++i) labels.push_back("a" + std::to_string(i + 1));
    return LossSpec(std::move(labels), n_actions,
                    [](std::size_t a, const ParamPoint& t) { return 1.0 - t[a]; },
                    /*bounded_unit=*/true, /*positive=*/false, LossStructure::linear_welfare);
}

/// Increasing variable cost of treating a fraction a: affine, or piecewise
/// linear through sorted knots (flat beyond the end knots).
class Psi {
public:
    static Psi affine(double intercept, double slope) {
        if (!std::isfinite(intercept) || !std::isfinite(slope) || slope < 0.0) {
            throw InvalidArgument("psi: affine cost needs finite intercept and slope >= 0");
        }
        Psi p;
        p.intercept_ = intercept;
        p.slope_ = slope;
        return p;
    }

    static Psi table(std::vector<std::pair<double, double>> knots) {
        if (knots.empty()) throw InvalidArgument("psi: empty table");
        for (std::size_t i = 0; i < knots.size(); ++i) {
            if (!std::isfinite(knots[i].first) || !std::isfinite(knots[i].second)) {
                throw InvalidArgument("psi: non-finite knot");
            }
            if (i > 0 && !(knots[i].first > knots[i - 1].first)) {
                throw InvalidArgument("psi: knots must be strictly increasing in a");
            }
            if (i > 0 && knots[i].second < knots[i - 1].second) {
                throw InvalidArgument("psi: cost must be nondecreasing");
            }
        }
        Psi p;
        p.knots_ = std::move(knots);
        return p;
    }

    bool is_affine() const { return knots_.empty(); }
    double intercept() const { return intercept_; }
    double slope() const { return slope_; }
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

    double operator()(double a) const {
        if (is_affine()) return intercept_ + slope_ * a;
        if (a <= knots_.front().first) return knots_.front().second;
        if (a >= knots_.back().first) return knots_.back().second;
        auto hi = std::upper_bound(knots_.begin(), knots_.end(), a,
                                   [](double x, const auto& k) { return x < k.first; });
        auto lo = hi - 1;
        const double w = (a - lo->first) / (hi->first - lo->first);
        return lo->second + w * (hi->second - lo->second);
    }

    friend bool operator==(const Psi&, const Psi&) = default;

private:
    double intercept_ = 0.0;
    double slope_ = 0.0;
    std::vector<std::pair<double, double>> knots_;
};

/// L(a, theta) = a (1 - theta) + psi(a) over treatment fractions, scalar theta
/// in [theta_lo, theta_hi]. Flags are derived from the loss's linearity in theta.
inline LossSpec treatment_loss(std::vector<double> fractions, Psi psi, double theta_lo = 0.0,
                               double theta_hi = 1.0) {
    if (fractions.empty()) throw InvalidArgument("treatment_loss: no actions");
    std::vector<std::string> labels;
    double lo = kInf, hi = -kInf;
    for (double a : fractions) {
        if (!(a > 0.0 && a <= 1.0)) throw InvalidArgument("treatment_loss: fraction outside (0,1]");
        labels.push_back("treat=" + std::to_string(a));
        const double at_lo = a * (1.0 - theta_lo) + psi(a);
        const double at_hi = a * (1.0 - theta_hi) + psi(a);
        lo = std::min({lo, at_lo, at_hi});
        hi = std::max({hi, at_lo, at_hi});
    }
    const bool bounded = lo >= 0.0 && hi <= 1.0;
    const bool positive = lo > 0.0;
    return LossSpec(std::move(labels), 1,
                    [fr = std::move(fractions), psi = std::move(psi)](std::size_t a,
                                                                      const ParamPoint& t) {
                        return fr[a] * (1.0 - t[0]) + psi(fr[a]);
                    },
                    bounded, positive, LossStructure::scalar_monotone);
}

/// Loss given by table[a][i] at grid point i; evaluation looks theta up by exact
/// coordinate match.
inline LossSpec table_loss(const ParamGrid& grid, std::vector<std::vector<double>> table,
                           std::vector<std::string> labels = {}) {
    if (table.empty()) throw InvalidArgument("table_loss: empty table");
    if (labels.empty()) {
        for (std::size_t i = 0; i < table.size(); ++i) labels.push_back("a" + std::to_string(i + 1));
    }
    if (labels.size() != table.size()) throw InvalidArgument("table_loss: label count mismatch");
    bool bounded = true, positive = true;
    for (const auto& row : table) {
        if (row.size() != grid.size()) throw InvalidArgument("table_loss: row length != grid size");
        for (double v : row) {
            if (!std::isfinite(v)) throw InvalidArgument("table_loss: non-finite entry");
            bounded = bounded && v >= 0.0 && v <= 1.0;
            positive = positive && v > 0.0;
        }
    }
    std::map<std::vector<double>, std::size_t> index;
    for (std::size_t i = 0; i < grid.size(); ++i) index.emplace(grid[i].coords, i);
    return LossSpec(std::move(labels), grid.dim(),
                    [tab = std::move(table), idx = std::move(index)](std::size_t a,
                                                                     const ParamPoint& t) {
                        auto it = idx.find(t.coords);
                        if (it == idx.end()) throw InvalidArgument("table_loss: point not on grid");
                        return tab[a][it->second];
                    },
                    bounded, positive, LossStructure::table);
}

/// Flag soundness sweep over the full action x grid product.
struct FlagSweep {
    double min_loss = kInf;
    double max_loss = -kInf;
    bool bounded_unit_ok = true;
    bool positive_ok = true;
};

inline FlagSweep sweep_flags(const LossSpec& spec, const ParamGrid& grid) {
    FlagSweep s;
    for (std::size_t a = 0; a < spec.num_actions(); ++a) {
        for (const auto& th : grid) {
            const double v = spec.raw(a, th);
            s.min_loss = std::min(s.min_loss, v);
            s.max_loss = std::max(s.max_loss, v);
        }
    }
    s.bounded_unit_ok = !spec.bounded_unit() || grid.empty() || (s.min_loss >= 0.0 && s.max_loss <= 1.0);
    s.positive_ok = !spec.positive() || grid.empty() || s.min_loss > 0.0;
    return s;
}

//---------------------------------------------------------------------------//
// Certified decisions
//---------------------------------------------------------------------------//

/// P-certificate at confidence level 1 - alpha.
struct PLevel {
    double level;
    friend bool operator==(const PLevel&, const PLevel&) = default;
};

/// E-certificate at multiple gamma.
struct EMultiple {
    double multiple;
    friend bool operator==(const EMultiple&, const EMultiple&) = default;
};

struct CertifiedDecision {
    static constexpr std::size_t kDefaultAction = std::numeric_limits<std::size_t>::max();

    std::size_t action = kDefaultAction;
    double risk_bound = 0.0;
    std::variant<PLevel, EMultiple> kind = PLevel{0.95};
    // The confidence set was empty; the bound is the sup-over-empty-set 0.
    bool vacuous = false;
    // Slack of the approximate argmin; finite action sets attain it exactly.
    double epsilon = 0.0;

    bool is_p() const { return std::holds_alternative<PLevel>(kind); }
    bool is_e() const { return std::holds_alternative<EMultiple>(kind); }
};

} // namespace certdec
