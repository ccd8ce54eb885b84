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

// Replication driver and report types. Replications are cut into fixed-size
// chunks; each chunk reduces its own rows, and chunk results are merged in
// chunk order, so the totals do not depend on the number of workers.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "certdec/core.hpp"
#include "certdec/sim/scenario.hpp"

namespace certdec::sim {

/// Neumaier-compensated sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    void merge(const CompensatedSum& o) {
        add(o.sum_);
        add(o.comp_);
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

enum class ColumnKind {
    rate,  ///< indicator; MC-SE sqrt(p (1 - p) / n)
    mean,  ///< real; MC-SE sd / sqrt(n)
    count, ///< indicator reported as a total
};

struct Column {
    std::string name;
    ColumnKind kind;
    bool reported = true;
};

/// Column registry for one scenario's per-replication row.
class Layout {
public:
    std::size_t add(std::string name, ColumnKind kind, bool reported = true) {
        columns_.push_back({std::move(name), kind, reported});
        return columns_.size() - 1;
    }
    std::size_t size() const { return columns_.size(); }
    const Column& operator[](std::size_t i) const { return columns_[i]; }

private:
    std::vector<Column> columns_;
};

class Accumulator {
public:
    explicit Accumulator(std::size_t n_cols) : sum_(n_cols), sumsq_(n_cols) {}

    void add_row(std::span<const double> row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            sum_[i].add(row[i]);
            sumsq_[i].add(row[i] * row[i]);
        }
        ++n_;
    }

    void merge(const Accumulator& o) {
        for (std::size_t i = 0; i < sum_.size(); ++i) {
            sum_[i].merge(o.sum_[i]);
            sumsq_[i].merge(o.sumsq_[i]);
        }
        n_ += o.n_;
    }

    std::size_t n() const { return n_; }
    double sum(std::size_t col) const { return sum_[col].value(); }
    double mean(std::size_t col) const { return n_ ? sum(col) / static_cast<double>(n_) : 0.0; }

    /// Standard error of the column mean.
    double mean_se(std::size_t col) const {
        if (n_ < 2) return 0.0;
        const double n = static_cast<double>(n_);
        const double m = mean(col);
        const double var = std::max(0.0, (sumsq_[col].value() - n * m * m) / (n - 1.0));
        return std::sqrt(var / n);
    }

private:
    std::vector<CompensatedSum> sum_;
    std::vector<CompensatedSum> sumsq_;
    std::size_t n_ = 0;
};

inline constexpr std::size_t kChunkSize = 1024;

inline unsigned resolve_workers(unsigned workers) {
    if (workers > 0) return workers;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(rep, row) for rep in [0, n_reps) and reduces the rows.
template <class RepFn>
Accumulator run_replications(std::size_t n_cols, std::size_t n_reps, unsigned workers, RepFn&& fn) {
    const std::size_t n_chunks = (n_reps + kChunkSize - 1) / kChunkSize;
    std::vector<Accumulator> chunks(n_chunks, Accumulator(n_cols));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        std::vector<double> row(n_cols);
        for (std::size_t c = next++; c < n_chunks; c = next++) {
            try {
                const std::size_t end = std::min(n_reps, (c + 1) * kChunkSize);
                for (std::size_t rep = c * kChunkSize; rep < end; ++rep) {
                    std::fill(row.begin(), row.end(), 0.0);
                    fn(rep, std::span<double>(row));
                    chunks[c].add_row(row);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n_chunks;
            }
        }
    };

    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(n_chunks, 1)));
    if (n_threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);

    Accumulator total(n_cols);
    for (const auto& c : chunks) total.merge(c);
    return total;
}

//---------------------------------------------------------------------------//
// Reports
//---------------------------------------------------------------------------//

struct Metric {
    std::string name;
    double value;
    double mc_se;
};

/// One guarantee check: passes when value <= limit (upper) or value >= limit.
struct AuditResult {
    std::string name;
    double value;
    double limit;
    bool upper;
    bool passed;
};

struct SimReport {
    Scenario scenario;
    std::size_t n_reps = 0;
    std::uint64_t seed = 0;
    std::vector<Metric> metrics;
    std::vector<AuditResult> audits;

    const Metric& metric(std::string_view name) const {
        for (const auto& m : metrics) {
            if (m.name == name) return m;
        }
        throw InvalidArgument("SimReport: no metric '" + std::string(name) + "'");
    }

    const AuditResult& audit(std::string_view name) const {
        for (const auto& a : audits) {
            if (a.name == name) return a;
        }
        throw InvalidArgument("SimReport: no audit '" + std::string(name) + "'");
    }

    bool all_passed() const {
        return std::all_of(audits.begin(), audits.end(), [](const auto& a) { return a.passed; });
    }

    void add_metric(std::string name, double value, double mc_se = 0.0) {
        metrics.push_back({std::move(name), value, mc_se});
    }

    void audit_at_most(std::string name, double value, double limit) {
        audits.push_back({std::move(name), value, limit, true, value <= limit});
    }

    void audit_at_least(std::string name, double value, double limit) {
        audits.push_back({std::move(name), value, limit, false, value >= limit});
    }
};

/// 3 standard errors of a rate estimated at its nominal value p over n draws.
inline double nominal_tolerance(double p, std::size_t n) {
    return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

/// Copies every reported column of acc into report.
inline void export_columns(const Layout& layout, const Accumulator& acc, SimReport& report) {
    for (std::size_t i = 0; i < layout.size(); ++i) {
        const auto& col = layout[i];
        if (!col.reported) continue;
        switch (col.kind) {
        case ColumnKind::rate: {
            const double p = acc.mean(i);
            const double se = std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(acc.n()));
            report.add_metric(col.name, p, se);
            break;
        }
        case ColumnKind::mean:
            report.add_metric(col.name, acc.mean(i), acc.mean_se(i));
            break;
        case ColumnKind::count:
            report.add_metric(col.name, acc.sum(i), 0.0);
            break;
        }
    }
}

} // namespace certdec::sim
