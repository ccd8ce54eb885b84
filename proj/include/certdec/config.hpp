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

// Scenario configuration: flat `key = value` lines grouped under optional
// `[section]` headers, `#` comments. Lists are comma or space separated.
// Dumping writes shortest round-trip numbers, so dump -> parse is exact.

#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <ostream>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "certdec/sim/harness.hpp"
#include "certdec/sim/scenario.hpp"

namespace certdec {

struct ConfigDiagnostic {
    std::string location;  ///< "file:line" or "override N"
    std::string field;
    std::string message;
};

class ConfigError : public InvalidArgument {
public:
    explicit ConfigError(std::vector<ConfigDiagnostic> diags)
        : InvalidArgument(render(diags)), diags_(std::move(diags)) {}
    const std::vector<ConfigDiagnostic>& diagnostics() const { return diags_; }

private:
    static std::string render(const std::vector<ConfigDiagnostic>& diags) {
        std::string s;
        for (const auto& d : diags) {
            if (!s.empty()) s += '\n';
            s += d.location + ": " + (d.field.empty() ? "" : d.field + ": ") + d.message;
        }
        return s;
    }
    std::vector<ConfigDiagnostic> diags_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
        const std::size_t b = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != ',') ++i;
        if (i > b) out.push_back(s.substr(b, i - b));
    }
    return out;
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw InvalidArgument("'" + std::string(s) + "' is not a number");
    }
    return v;
}

inline std::uint64_t parse_uint(std::string_view s) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw InvalidArgument("'" + std::string(s) + "' is not a non-negative integer");
    }
    return v;
}

inline double parse_single(std::string_view s) {
    const auto items = split_list(s);
    if (items.size() != 1) throw InvalidArgument("expects a single number");
    return parse_double(items[0]);
}

inline std::vector<double> parse_vector(std::string_view s) {
    std::vector<double> v;
    for (auto item : split_list(s)) v.push_back(parse_double(item));
    return v;
}

/// "0.05" (slope), "affine 0 0.05" or "table 0.5:0.02 1:0.06".
inline Psi parse_psi(std::string_view s) {
    auto items = split_list(s);
    if (items.empty()) throw InvalidArgument("empty value");
    if (items[0] == "affine") {
        if (items.size() != 3) throw InvalidArgument("affine needs intercept and slope");
        return Psi::affine(parse_double(items[1]), parse_double(items[2]));
    }
    if (items[0] == "table") {
        std::vector<std::pair<double, double>> knots;
        for (std::size_t i = 1; i < items.size(); ++i) {
            const auto colon = items[i].find(':');
            if (colon == std::string_view::npos) throw InvalidArgument("table knots are written a:value");
            knots.emplace_back(parse_double(items[i].substr(0, colon)), parse_double(items[i].substr(colon + 1)));
        }
        return Psi::table(std::move(knots));
    }
    if (items.size() != 1) throw InvalidArgument("expects a slope, 'affine i s' or 'table a:v ...'");
    return Psi::affine(0.0, parse_double(items[0]));
}

inline void apply(sim::Scenario& s, const std::string& key, std::string_view value) {
    if (key == "name") {
        if (value == "winners") s.name = sim::ScenarioName::winners;
        else if (value == "treatment") s.name = sim::ScenarioName::treatment;
        else if (value == "etrack") s.name = sim::ScenarioName::etrack;
        else throw InvalidArgument("must be winners, treatment or etrack");
    } else if (key == "alpha") s.alpha = parse_single(value);
    else if (key == "C") s.C = parse_single(value);
    else if (key == "u") s.u = parse_single(value);
    else if (key == "gamma") {
        if (value == "none") s.gamma.reset();
        else s.gamma = parse_single(value);
    } else if (key == "theta") s.theta = parse_vector(value);
    else if (key == "sigma") s.sigma = parse_vector(value);
    else if (key == "correlation") s.correlation = parse_vector(value);
    else if (key == "psi") s.psi = parse_psi(value);
    else if (key == "rho") s.rho = parse_single(value);
    else if (key == "kappa") s.kappa = parse_single(value);
    else if (key == "action_min") s.action_min = parse_single(value);
    else if (key == "n_actions") s.n_actions = parse_uint(value);
    else if (key == "theta_points") s.theta_points = parse_vector(value);
    else if (key == "n_reps") s.n_reps = parse_uint(value);
    else if (key == "seed") s.seed = parse_uint(value);
    else if (key == "n_draws_critval") s.n_draws_critval = parse_uint(value);
    else if (key == "grid_resolution") s.grid_resolution = parse_uint(value);
    else if (key == "challenger") s.challenger = std::string(value);
    else if (key == "rule") s.rule = std::string(value);
    else throw InvalidArgument("unknown key");
}

struct Setting {
    std::string key;
    std::string value;
    std::string location;
};

inline void split_assignment(std::string_view line, const std::string& location, std::vector<Setting>& out,
                             std::vector<ConfigDiagnostic>& diags) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
        diags.push_back({location, "", "expected key = value"});
        return;
    }
    const auto key = std::string(trim(line.substr(0, eq)));
    const auto value = std::string(trim(line.substr(eq + 1)));
    if (key.empty()) {
        diags.push_back({location, "", "missing key"});
        return;
    }
    out.push_back({key, value, location});
}

} // namespace detail

/// Parses config text, then applies `key=value` overrides in order. Every
/// problem is reported with its location; validation failures point at the
/// line that last set the offending key.
inline sim::Scenario parse_config(std::string_view text, const std::string& source,
                                  const std::vector<std::string>& overrides = {}) {
    std::vector<detail::Setting> settings;
    std::vector<ConfigDiagnostic> diags;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::string location = source + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']' || detail::trim(line.substr(1, line.size() - 2)).empty()) {
                diags.push_back({location, "", "malformed section header"});
            }
            continue;
        }
        detail::split_assignment(line, location, settings, diags);
    }
    for (std::size_t i = 0; i < overrides.size(); ++i) {
        detail::split_assignment(overrides[i], "override " + std::to_string(i + 1), settings, diags);
    }

    sim::Scenario s;
    std::map<std::string, std::string> where;
    for (const auto& st : settings) {
        try {
            detail::apply(s, st.key, st.value);
            where[st.key] = st.location;
        } catch (const std::exception& e) {
            diags.push_back({st.location, st.key, e.what()});
        }
    }
    if (diags.empty()) {
        for (const auto& issue : s.issues()) {
            const auto it = where.find(issue.field);
            diags.push_back({it == where.end() ? source + ": (default)" : it->second, issue.field, issue.message});
        }
    }
    if (!diags.empty()) throw ConfigError(std::move(diags));
    return s;
}

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::string fmt(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ", ") + fmt(x);
    return s;
}

inline std::string fmt(const Psi& p) {
    if (p.is_affine()) return "affine " + fmt(p.intercept()) + " " + fmt(p.slope());
    std::string s = "table";
    for (const auto& [a, v] : p.knots()) s += " " + fmt(a) + ":" + fmt(v);
    return s;
}

} // namespace detail

/// Config text that parses back to exactly s.
inline std::string dump_config(const sim::Scenario& s) {
    using detail::fmt;
    std::ostringstream o;
    o << "[scenario]\n";
    o << "name = " << sim::to_string(s.name) << "\n";
    o << "\n[model]\n";
    o << "theta = " << fmt(s.theta) << "\n";
    o << "sigma = " << fmt(s.sigma) << "\n";
    if (!s.correlation.empty()) o << "correlation = " << fmt(s.correlation) << "\n";
    o << "psi = " << fmt(s.psi) << "\n";
    o << "rho = " << fmt(s.rho) << "\n";
    o << "kappa = " << fmt(s.kappa) << "\n";
    o << "action_min = " << fmt(s.action_min) << "\n";
    o << "n_actions = " << s.n_actions << "\n";
    o << "theta_points = " << fmt(s.theta_points) << "\n";
    o << "\n[decision]\n";
    o << "alpha = " << fmt(s.alpha) << "\n";
    o << "C = " << fmt(s.C) << "\n";
    o << "u = " << fmt(s.u) << "\n";
    o << "gamma = " << (s.gamma ? fmt(*s.gamma) : std::string("none")) << "\n";
    o << "rule = " << s.rule << "\n";
    o << "challenger = " << s.challenger << "\n";
    o << "\n[simulation]\n";
    o << "n_reps = " << s.n_reps << "\n";
    o << "seed = " << s.seed << "\n";
    o << "n_draws_critval = " << s.n_draws_critval << "\n";
    o << "grid_resolution = " << s.grid_resolution << "\n";
    return o.str();
}

/// metric,value,mc_se,n_reps,seed; one row per metric.
inline void write_report_csv(std::ostream& os, const sim::SimReport& r) {
    using detail::fmt;
    os << "metric,value,mc_se,n_reps,seed\n";
    for (const auto& m : r.metrics) {
        os << m.name << ',' << fmt(m.value) << ',' << fmt(m.mc_se) << ',' << r.n_reps << ',' << r.seed << '\n';
    }
}

inline void write_report_text(std::ostream& os, const sim::SimReport& r) {
    char line[160];
    std::snprintf(line, sizeof line, "scenario %s  n_reps %zu  seed %llu\n", sim::to_string(r.scenario.name),
                  r.n_reps, static_cast<unsigned long long>(r.seed));
    os << line << "\n";
    for (const auto& m : r.metrics) {
        std::snprintf(line, sizeof line, "  %-46s %14.6g  +- %.2g\n", m.name.c_str(), m.value, m.mc_se);
        os << line;
    }
    if (r.audits.empty()) return;
    os << "\naudits\n";
    for (const auto& a : r.audits) {
        std::snprintf(line, sizeof line, "  %-46s %-4s %14.6g %s %.6g\n", a.name.c_str(), a.passed ? "ok" : "FAIL",
                      a.value, a.upper ? "<=" : ">=", a.limit);
        os << line;
    }
}

} // namespace certdec
