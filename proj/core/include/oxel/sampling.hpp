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

#include <vector>

#include "oxel/rng.hpp"
#include "oxel/viewgen.hpp"

namespace oxel {

/// Disjoint decomposition of all pixels into matched pairs (positives, with
/// their mapped targets) and random pairs (negatives, with random targets).
struct PixelSampleSet {
    struct Pair {
        Pixel source;
        Pixel target;
    };
    std::vector<Pair> positives;
    std::vector<Pair> negatives;
    double realized_fraction = 0.0;  // |positives| / (H*W)
};

/// Selects round(f * H * W) positives uniformly among valid pixels (capped by
/// the valid count); every remaining pixel becomes a negative whose target is
/// drawn uniformly over the grid, redrawn while it equals the mapped target.
/// exclusion_radius 0 forbids exact equality only.
PixelSampleSet build_sample_set(const CorrespondenceMap& corr, double fraction, Rng& rng,
                                int exclusion_radius = 0);

}  // namespace oxel
