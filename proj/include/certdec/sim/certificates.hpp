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

// Per-certificate bookkeeping shared by the scenario runners.

#pragma once

#include <string>

#include "certdec/sim/harness.hpp"

namespace certdec::sim {

/// Columns tracking one certified decision across replications.
struct CertColumns {
    std::size_t valid;    ///< 1(L <= R)
    std::size_t bound;    ///< R
    std::size_t adopt;    ///< 1(R <= C)
    std::size_t realized; ///< q L + (1 - q) C
    std::size_t gap;      ///< realized - (alpha + q R + (1 - q) C)
    std::string prefix;
};

inline CertColumns add_cert_columns(Layout& layout, const std::string& prefix) {
    CertColumns c;
    c.prefix = prefix;
    c.valid = layout.add(prefix + "cert_valid_rate", ColumnKind::rate);
    c.bound = layout.add(prefix + "mean_R", ColumnKind::mean);
    c.adopt = layout.add(prefix + "adoption_rate", ColumnKind::rate);
    c.realized = layout.add(prefix + "mean_realized_risk", ColumnKind::mean);
    c.gap = layout.add(prefix + "pathwise_gap", ColumnKind::mean, false);
    return c;
}

inline void record_cert(std::span<double> row, const CertColumns& c, double loss, double R,
                        double C, double u, double alpha) {
    const double q = R <= C ? u : 0.0;
    const double realized = q * loss + (1.0 - q) * C;
    row[c.valid] = loss <= R ? 1.0 : 0.0;
    row[c.bound] = R;
    row[c.adopt] = R <= C ? 1.0 : 0.0;
    row[c.realized] = realized;
    row[c.gap] = realized - (alpha + q * R + (1.0 - q) * C);
}

/// Certificate validity at 1 - alpha; with a loss bounded by 1, also the
/// worst-case adoption risk C + u alpha (1 - C) and the model-specific
/// bound alpha + E[q R + (1 - q) C].
inline void audit_cert(SimReport& report, const Accumulator& acc, const CertColumns& c,
                       double alpha, double C, double u, bool bounded_loss) {
    const std::size_t n = acc.n();
    const std::string p = c.prefix;
    report.audit_at_least(p + "cert_valid", acc.mean(c.valid),
                          (1.0 - alpha) - nominal_tolerance(1.0 - alpha, n));
    if (!bounded_loss) return;
    report.audit_at_most(p + "worst_case_bound", acc.mean(c.realized),
                         C + u * alpha * (1.0 - C) + 3.0 * acc.mean_se(c.realized));
    report.audit_at_most(p + "pathwise_bound", acc.mean(c.gap), 3.0 * acc.mean_se(c.gap));
}

} // namespace certdec::sim
