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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "certdec/normal.hpp"
#include "certdec/rng.hpp"

using namespace certdec;

namespace {

// Quantile oracle independent of the library: bisection on erfc.
double bisect_quantile(double p) {
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST(Normal, QuantileMatchesBisection) {
    for (double p : {1e-10, 0.001, 0.025, 0.05, 0.3, 0.5, 0.7, 0.95, 0.975, 0.999}) {
        EXPECT_NEAR(normal_quantile(p), bisect_quantile(p), 1e-9) << p;
    }
    EXPECT_NEAR(normal_quantile(0.95), 1.6448536269514722, 1e-12);
    EXPECT_EQ(normal_quantile(0.5), 0.0);
    EXPECT_THROW(normal_quantile(0.0), InvalidArgument);
    EXPECT_THROW(normal_quantile(1.0), InvalidArgument);
}

TEST(Normal, CdfAndLogPdf) {
    EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
    EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
    EXPECT_NEAR(normal_log_pdf(1.0, 1.0, 2.0), -std::log(2.0 * std::sqrt(2.0 * M_PI)), 1e-14);
}

TEST(Rng, SameKeySameStream) {
    CounterRng a(7, Stream::replication, 3), b(7, Stream::replication, 3);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Rng, SubstreamsDiffer) {
    std::set<std::uint64_t> firsts;
    for (std::uint64_t seed : {0, 1}) {
        for (auto s : {Stream::critical_value, Stream::replication, Stream::two_point, Stream::challenger}) {
            for (std::uint64_t i = 0; i < 50; ++i) firsts.insert(CounterRng(seed, s, i)());
        }
    }
    EXPECT_EQ(firsts.size(), 2u * 4u * 50u);
}

TEST(Rng, UniformMoments) {
    CounterRng rng(11, Stream::replication, 0);
    double sum = 0.0, sumsq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
        sumsq += u * u;
    }
    EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
    EXPECT_NEAR(sumsq / n - (sum / n) * (sum / n), 1.0 / 12.0, 2e-3);
}
