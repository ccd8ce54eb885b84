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

// Confidence sets: projection boxes for inference on winners, uniformly most
// accurate scalar lower bounds, and the inversion of a loss certificate.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "certdec/core.hpp"
#include "certdec/normal.hpp"
#include "certdec/rng.hpp"

namespace certdec {

enum class Construction { projection, studentized_projection, uma_lower, inversion, trivial };

inline const char* to_string(Construction c) {
    switch (c) {
    case Construction::projection: return "projection";
    case Construction::studentized_projection: return "studentized_projection";
    case Construction::uma_lower: return "uma_lower";
    case Construction::inversion: return "inversion";
    case Construction::trivial: return "trivial";
    }
    return "?";
}

/// Axis-aligned box lower <= theta <= upper; empty when any lower > upper.
struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    bool empty() const {
        for (std::size_t i = 0; i < lower.size(); ++i) {
            if (lower[i] > upper[i]) return true;
        }
        return false;
    }

    bool contains(const ParamPoint& p) const {
        if (p.dim() != lower.size()) return false;
        for (std::size_t i = 0; i < lower.size(); ++i) {
            if (p[i] < lower[i] || p[i] > upper[i]) return false;
        }
        return true;
    }
};

/// Membership predicate over the parameter space plus metadata. When the set
/// is a box, the box is kept alongside so analytic minimax paths can use it;
/// the predicate is then exactly box membership.
class ConfidenceSet {
public:
    using Predicate = std::function<bool(const ParamPoint&)>;

    ConfidenceSet(Predicate member, double nominal_level, Construction construction)
        : member_(std::move(member)), level_(nominal_level), construction_(construction) {
        check_level();
    }

    ConfidenceSet(Box box, double nominal_level, Construction construction)
        : level_(nominal_level), construction_(construction), box_(std::move(box)) {
        check_level();
        member_ = [b = *box_](const ParamPoint& p) { return b.contains(p); };
    }

    bool contains(const ParamPoint& p) const { return member_(p); }
    double nominal_level() const { return level_; }
    Construction construction() const { return construction_; }
    const std::optional<Box>& box() const { return box_; }

    /// Indices of grid points inside the set, once materialized.
    const std::optional<std::vector<std::size_t>>& grid_view() const { return grid_view_; }

    ConfidenceSet materialized(const ParamGrid& grid) const {
        ConfidenceSet out = *this;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (member_(grid[i])) idx.push_back(i);
        }
        out.grid_view_ = std::move(idx);
        return out;
    }

private:
    void check_level() const {
        if (!(level_ > 0.0 && level_ < 1.0)) {
            throw InvalidArgument("ConfidenceSet: nominal level outside (0,1)");
        }
    }

    Predicate member_;
    double level_;
    Construction construction_;
    std::optional<Box> box_;
    std::optional<std::vector<std::size_t>> grid_view_;
};

//---------------------------------------------------------------------------//
// Inference on winners
//---------------------------------------------------------------------------//

struct WinnersData {
    std::vector<double> x;
    std::vector<double> sigma;

    void validate() const {
        if (x.empty()) throw InvalidArgument("WinnersData: no actions");
        if (x.size() != sigma.size()) throw InvalidArgument("WinnersData: X and sigma lengths differ");
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!std::isfinite(x[i]) || !std::isfinite(sigma[i])) {
                throw InvalidArgument("WinnersData: non-finite entry");
            }
            if (!(sigma[i] > 0.0)) throw InvalidArgument("WinnersData: sigma must be > 0");
        }
    }
};

/// Joint law of the standardized estimation errors Z.
class ErrorLaw {
public:
    static ErrorLaw independent_normal(std::size_t dim) {
        ErrorLaw law;
        law.kind_ = Kind::independent;
        law.dim_ = dim;
        return law;
    }

    /// Normal with unit variances and the given row-major correlation matrix.
    static ErrorLaw correlated_normal(std::size_t dim, const std::vector<double>& corr) {
        if (corr.size() != dim * dim) throw InvalidArgument("ErrorLaw: correlation must be dim x dim");
        Eigen::MatrixXd m(dim, dim);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                const double v = corr[i * dim + j];
                if (!std::isfinite(v)) throw InvalidArgument("ErrorLaw: non-finite correlation");
                m(i, j) = v;
            }
        }
        for (std::size_t i = 0; i < dim; ++i) {
            if (m(i, i) != 1.0) throw InvalidArgument("ErrorLaw: correlation diagonal must be 1");
            for (std::size_t j = 0; j < i; ++j) {
                if (m(i, j) != m(j, i)) throw InvalidArgument("ErrorLaw: correlation not symmetric");
            }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(m);
        if (llt.info() != Eigen::Success) {
            throw InvalidArgument("ErrorLaw: correlation not positive definite");
        }
        const Eigen::MatrixXd l = llt.matrixL();
        ErrorLaw law;
        law.kind_ = Kind::correlated;
        law.dim_ = dim;
        law.chol_.resize(dim * dim);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) law.chol_[i * dim + j] = l(i, j);
        }
        return law;
    }

    /// Z = 0 almost surely.
    static ErrorLaw degenerate(std::size_t dim) {
        ErrorLaw law;
        law.kind_ = Kind::degenerate;
        law.dim_ = dim;
        return law;
    }

    std::size_t dim() const { return dim_; }

    /// Fills out (size dim) with one draw of Z.
    template <class Rng>
    void draw(Rng& rng, std::span<double> out) const {
        switch (kind_) {
        case Kind::degenerate:
            std::fill(out.begin(), out.end(), 0.0);
            return;
        case Kind::independent: {
            std::normal_distribution<double> nd;
            for (auto& z : out) z = nd(rng);
            return;
        }
        case Kind::correlated: {
            std::normal_distribution<double> nd;
            for (auto& z : out) z = nd(rng);
            for (std::size_t i = dim_; i-- > 0;) {
                double s = 0.0;
                for (std::size_t j = 0; j <= i; ++j) s += chol_[i * dim_ + j] * out[j];
                out[i] = s;
            }
            return;
        }
        }
    }

private:
    enum class Kind { independent, correlated, degenerate };
    Kind kind_ = Kind::independent;
    std::size_t dim_ = 0;
    std::vector<double> chol_;
};

/// 1-based rank of the conservative empirical (1 - alpha)-quantile.
inline std::size_t quantile_rank(double alpha, std::size_t n) {
    const double t = (1.0 - alpha) * static_cast<double>(n);
    auto k = static_cast<std::size_t>(std::ceil(t - 1e-9));
    return std::clamp<std::size_t>(k, 1, n);
}

/// Empirical (1 - alpha)-quantile of max_a Z(a) sigma(a), or of max_a Z(a)
/// when studentized, from n_draws seeded draws of Z.
inline double critical_value(std::span<const double> sigma, const ErrorLaw& law, double alpha,
                             std::size_t n_draws, std::uint64_t seed, bool studentized) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("critical_value: alpha outside (0,1)");
    if (n_draws < 1000) throw InvalidArgument("critical_value: n_draws must be >= 1000");
    if (sigma.size() != law.dim() || sigma.empty()) {
        throw InvalidArgument("critical_value: sigma length does not match error law");
    }
    for (double s : sigma) {
        if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("critical_value: sigma must be > 0");
    }
    CounterRng rng(seed, Stream::critical_value, 0);
    std::vector<double> z(law.dim());
    std::vector<double> maxima(n_draws);
    for (std::size_t n = 0; n < n_draws; ++n) {
        law.draw(rng, z);
        double m = -kInf;
        for (std::size_t a = 0; a < z.size(); ++a) {
            m = std::max(m, studentized ? z[a] : z[a] * sigma[a]);
        }
        maxima[n] = m;
    }
    const std::size_t k = quantile_rank(alpha, n_draws) - 1;
    std::nth_element(maxima.begin(), maxima.begin() + static_cast<std::ptrdiff_t>(k), maxima.end());
    return maxima[k];
}

/// {theta in [0,1]^A : theta(a) >= X(a) - c} or, studentized,
/// {theta(a) >= X(a) - sigma(a) c}.
inline ConfidenceSet projection_box(const WinnersData& data, double c, bool studentized,
                                    double nominal_level) {
    data.validate();
    if (!std::isfinite(c)) throw InvalidArgument("projection_box: critical value not finite");
    Box box;
    box.lower.resize(data.x.size());
    box.upper.assign(data.x.size(), 1.0);
    for (std::size_t a = 0; a < data.x.size(); ++a) {
        const double lo = studentized ? data.x[a] - data.sigma[a] * c : data.x[a] - c;
        box.lower[a] = std::max(lo, 0.0);
    }
    return ConfidenceSet(std::move(box), nominal_level,
                         studentized ? Construction::studentized_projection
                                     : Construction::projection);
}

//---------------------------------------------------------------------------//
// Scalar lower bounds
//---------------------------------------------------------------------------//

/// Uniformly most accurate 1 - alpha lower bound X + sigma z_alpha for a
/// normal mean with known sigma.
inline double uma_lower_bound(double x, double sigma, double alpha) {
    if (!(sigma > 0.0)) throw InvalidArgument("uma_lower_bound: sigma must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("uma_lower_bound: alpha outside (0,1)");
    return x + sigma * normal_quantile(alpha);
}

/// [theta_hat, inf) intersected with the interval [theta_lo, theta_hi].
inline ConfidenceSet uma_lower_set(double theta_hat, double theta_lo, double theta_hi,
                                   double nominal_level) {
    Box box{{std::max(theta_hat, theta_lo)}, {theta_hi}};
    return ConfidenceSet(std::move(box), nominal_level, Construction::uma_lower);
}

//---------------------------------------------------------------------------//
// Certificate inversion
//---------------------------------------------------------------------------//

namespace detail {

inline std::pair<double, double> grid_bounds_1d(const ParamGrid& grid) {
    double lo = kInf, hi = -kInf;
    for (const auto& p : grid) {
        lo = std::min(lo, p[0]);
        hi = std::max(hi, p[0]);
    }
    return {lo, hi};
}

/// Smallest t in [lo, hi] (to the last double) with L(t) <= r for L weakly
/// decreasing; nullopt when even L(hi) > r.
inline std::optional<double> monotone_threshold(const std::function<double(double)>& loss,
                                                double r, double lo, double hi) {
    if (loss(hi) > r) return std::nullopt;
    if (loss(lo) <= r) return lo;
    double bad = lo, good = hi;
    while (std::nextafter(bad, good) < good) {
        const double mid = bad + 0.5 * (good - bad);
        if (mid <= bad || mid >= good) break;
        (loss(mid) <= r ? good : bad) = mid;
    }
    return good;
}

} // namespace detail

/// {theta : L(delta_tilde, theta) <= R_tilde}. For structured losses the set
/// also carries its box, built so that the box's worst-case loss for
/// delta_tilde never exceeds R_tilde in floating point.
inline ConfidenceSet invert_certificate(std::size_t delta_tilde, double r_tilde,
                                        const LossSpec& spec, const ParamGrid& grid,
                                        double nominal_level) {
    if (!(r_tilde >= 0.0)) throw InvalidArgument("invert_certificate: R_tilde must be >= 0");
    if (delta_tilde >= spec.num_actions()) {
        throw InvalidArgument("invert_certificate: action index out of range");
    }
    switch (spec.structure()) {
    case LossStructure::linear_welfare: {
        const std::size_t dim = spec.param_dim();
        Box box{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
        // Smallest double lo with 1 - lo <= R_tilde, so box and predicate agree.
        double lo = 1.0 - r_tilde;
        while (1.0 - lo > r_tilde) lo = std::nextafter(lo, 2.0);
        while (lo > 0.0 && 1.0 - std::nextafter(lo, -2.0) <= r_tilde) lo = std::nextafter(lo, -2.0);
        box.lower[delta_tilde] = std::max(lo, 0.0);
        return ConfidenceSet(std::move(box), nominal_level, Construction::inversion).materialized(grid);
    }
    case LossStructure::scalar_monotone: {
        if (!grid.empty()) {
            const auto [lo, hi] = detail::grid_bounds_1d(grid);
            auto loss = [&](double t) { return spec.raw(delta_tilde, ParamPoint::scalar(t)); };
            const auto t = detail::monotone_threshold(loss, r_tilde, lo, hi);
            Box box = t ? Box{{*t}, {hi}} : Box{{kInf}, {hi}};
            return ConfidenceSet(std::move(box), nominal_level, Construction::inversion)
                .materialized(grid);
        }
        break;
    }
    case LossStructure::table:
        break;
    }
    return ConfidenceSet(
               [spec, delta_tilde, r_tilde](const ParamPoint& p) {
                   return spec.raw(delta_tilde, p) <= r_tilde;
               },
               nominal_level, Construction::inversion)
        .materialized(grid);
}

} // namespace certdec
