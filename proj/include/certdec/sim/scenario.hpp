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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "certdec/confset.hpp"
#include "certdec/core.hpp"

namespace certdec::sim {

enum class ScenarioName { winners, treatment, etrack };

inline const char* to_string(ScenarioName n) {
    switch (n) {
    case ScenarioName::winners: return "winners";
    case ScenarioName::treatment: return "treatment";
    case ScenarioName::etrack: return "etrack";
    }
    return "?";
}

/// A validation failure tied to the configuration key that caused it.
struct FieldIssue {
    std::string field;
    std::string message;
};

class ScenarioError : public InvalidArgument {
public:
    explicit ScenarioError(std::vector<FieldIssue> issues)
        : InvalidArgument(join(issues)), issues_(std::move(issues)) {}
    const std::vector<FieldIssue>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<FieldIssue>& issues) {
        std::string s;
        for (const auto& i : issues) s += (s.empty() ? "" : "; ") + i.field + ": " + i.message;
        return s;
    }
    std::vector<FieldIssue> issues_;
};

/// Everything a Monte Carlo run needs. Fields irrelevant to the named
/// scenario are carried along but ignored.
struct Scenario {
    ScenarioName name = ScenarioName::winners;
    std::vector<double> theta{0.6, 0.6};  ///< true parameter
    std::vector<double> sigma{0.1, 0.1};  ///< standard errors (one per action, or one)
    std::vector<double> correlation;      ///< row-major error correlation; empty = independent
    double alpha = 0.05;
    double C = 0.5;                       ///< default-action cost (treatment derives it)
    double u = 1.0;                       ///< adoption cap
    std::optional<double> gamma;          ///< truncation multiple for the E-track
    Psi psi = Psi::affine(0.0, 0.05);
    double rho = 0.5;
    double kappa = 0.05;
    double action_min = 0.5;              ///< smallest treatment fraction
    std::size_t n_actions = 51;           ///< treatment fractions on [action_min, 1]
    std::vector<double> theta_points{0.0, 1.0}; ///< E-track parameter grid
    std::size_t n_reps = 100000;
    std::uint64_t seed = 0;
    std::size_t n_draws_critval = 100000;
    std::size_t grid_resolution = 101;
    std::string challenger = "trivial";   ///< audit challenger
    std::string rule = "threshold";       ///< adoption rule for `adopt`

    /// Cost of the default action; for treatment, (1 - rho) - kappa.
    double effective_C() const { return name == ScenarioName::treatment ? (1.0 - rho) - kappa : C; }

    std::vector<double> treatment_fractions() const { return linspace(action_min, 1.0, n_actions); }

    std::vector<FieldIssue> issues() const;

    void validate() const {
        auto found = issues();
        if (!found.empty()) throw ScenarioError(std::move(found));
    }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline const std::vector<std::string>& challenger_names() {
    static const std::vector<std::string> names{"trivial", "studentized", "self"};
    return names;
}

inline std::vector<FieldIssue> Scenario::issues() const {
    std::vector<FieldIssue> out;
    auto bad = [&](std::string f, std::string m) { out.push_back({std::move(f), std::move(m)}); };
    auto finite_all = [](const std::vector<double>& v) {
        for (double x : v) {
            if (!std::isfinite(x)) return false;
        }
        return true;
    };

    if (!(alpha > 0.0 && alpha < 1.0)) bad("alpha", "must lie in (0,1)");
    if (!(u >= 0.0 && u <= 1.0)) bad("u", "must lie in [0,1]");
    if (n_reps < 1) bad("n_reps", "must be >= 1");
    if (n_draws_critval < 1000) bad("n_draws_critval", "must be >= 1000");
    if (grid_resolution < 2) bad("grid_resolution", "must be >= 2");
    if (gamma && !(*gamma > 0.0 && std::isfinite(*gamma))) bad("gamma", "must be a finite value > 0");
    if (!finite_all(theta)) bad("theta", "must be finite");
    if (!finite_all(sigma)) bad("sigma", "must be finite");
    for (double s : sigma) {
        if (!(s > 0.0)) {
            bad("sigma", "must be > 0 (degenerate noise is not allowed)");
            break;
        }
    }
    if (challenger != "trivial" && challenger != "studentized" && challenger != "self") {
        bad("challenger", "must be one of trivial, studentized, self");
    }
    if (rule != "threshold" && rule != "constant") bad("rule", "must be threshold or constant");

    switch (name) {
    case ScenarioName::winners:
        if (!(C >= 0.0 && C < 1.0)) bad("C", "must lie in [0,1)");
        if (theta.empty()) bad("theta", "needs one value per action");
        for (double t : theta) {
            if (!(t >= 0.0 && t <= 1.0)) {
                bad("theta", "must lie in [0,1] for the winners loss");
                break;
            }
        }
        if (sigma.size() != theta.size()) bad("sigma", "needs one value per action");
        if (!correlation.empty()) {
            if (correlation.size() != theta.size() * theta.size()) {
                bad("correlation", "must be an n x n row-major matrix");
            } else if (!finite_all(correlation)) {
                bad("correlation", "must be finite");
            } else {
                try {
                    ErrorLaw::correlated_normal(theta.size(), correlation);
                } catch (const InvalidArgument& e) {
                    bad("correlation", e.what());
                }
            }
        }
        break;
    case ScenarioName::treatment: {
        if (theta.size() != 1 || !(theta[0] >= 0.0 && theta[0] <= 1.0)) {
            bad("theta", "needs a single value in [0,1]");
        }
        if (sigma.size() != 1) bad("sigma", "needs a single value");
        if (!(action_min > 0.0 && action_min <= 1.0)) bad("action_min", "must lie in (0,1]");
        if (n_actions < 1) bad("n_actions", "must be >= 1");
        if (!(std::isfinite(rho) && std::isfinite(kappa))) bad("rho", "rho and kappa must be finite");
        const double c = effective_C();
        if (!(c > 0.0)) {
            bad("kappa", "default cost (1 - rho) - kappa must be > 0");
        } else if (action_min > 0.0 && action_min <= 1.0 && n_actions >= 1) {
            // The adoption threshold on theta must fall inside [0, 1].
            double at0 = kInf, at1 = kInf;
            for (double a : treatment_fractions()) {
                at0 = std::min(at0, a + psi(a));
                at1 = std::min(at1, psi(a));
            }
            if (!(c >= at1 && c <= at0)) {
                bad("kappa", "default cost (1 - rho) - kappa must lie in [min_a psi(a), min_a (a + psi(a))] "
                             "so the adoption threshold lies in [0,1]");
            }
            if (!(at1 > 0.0)) bad("psi", "psi must be > 0 on the action grid (positive loss)");
        }
        if (challenger == "studentized") bad("challenger", "studentized is a winners challenger");
        break;
    }
    case ScenarioName::etrack: {
        if (!(C > 0.0)) bad("C", "must be > 0");
        if (theta.size() != 1) bad("theta", "needs a single value");
        if (sigma.size() != 1) bad("sigma", "needs a single value");
        if (theta_points.size() < 2 || !finite_all(theta_points)) {
            bad("theta_points", "needs at least two finite values");
        } else {
            auto sorted = theta_points;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
                bad("theta_points", "values must be distinct");
            }
            if (theta.size() == 1 &&
                std::find(theta_points.begin(), theta_points.end(), theta[0]) == theta_points.end()) {
                bad("theta", "must be one of theta_points");
            }
        }
        break;
    }
    }
    return out;
}

} // namespace certdec::sim
