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

// Counter-based random streams. Every replication owns a stream keyed by
// (seed, stream id, replication index), so results never depend on how
// replications are scheduled across workers.

#pragma once

#include <cstdint>
#include <limits>

namespace certdec {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stream identifiers; distinct ids give statistically unrelated streams.
enum class Stream : std::uint64_t {
    critical_value = 1,
    replication = 2,
    two_point = 3,
    challenger = 4,
};

inline constexpr std::uint64_t substream_key(std::uint64_t seed, Stream stream,
                                             std::uint64_t index) {
    const std::uint64_t s = mix64(seed + kGoldenGamma * (static_cast<std::uint64_t>(stream) + 1));
    return mix64(s ^ mix64(index + kGoldenGamma));
}

/// SplitMix64 evaluated at (key + n * gamma) for n = 1, 2, ...; satisfies
/// UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}
    CounterRng(std::uint64_t seed, Stream stream, std::uint64_t index)
        : key_(substream_key(seed, stream, index)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() { return mix64(key_ + kGoldenGamma * ++counter_); }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace certdec
