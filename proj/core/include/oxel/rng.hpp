// Copyright 2025 The Oxel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace oxel {

/// Deterministic random source. Distributions are implemented by hand so the
/// byte stream depends only on the seed, never on the standard library build.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    int64_t uniform_int(int64_t n) {
        // rejection sampling keeps the draw exactly uniform
        const uint64_t un = static_cast<uint64_t>(n);
        const uint64_t limit = UINT64_MAX - UINT64_MAX % un;
        uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return static_cast<int64_t>(v % un);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 eng_;
};

/// Derives an independent stream seed from (seed, tag), so subsystems consume
/// decoupled random streams in a reproducible way.
uint64_t derive_seed(uint64_t seed, std::string_view tag);

}  // namespace oxel
