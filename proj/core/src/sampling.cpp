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

#include "oxel/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace oxel {

PixelSampleSet build_sample_set(const CorrespondenceMap& corr, double fraction, Rng& rng,
                                int exclusion_radius) {
    OXEL_CHECK_CONFIG(fraction >= 0.0 && fraction <= 1.0,
                      "build_sample_set: fraction must be in [0, 1]");
    const int h = corr.height, w = corr.width;
    const size_t total = static_cast<size_t>(h) * w;

    std::vector<size_t> valid_idx;
    valid_idx.reserve(total);
    for (size_t i = 0; i < total; ++i)
        if (corr.valid[i]) valid_idx.push_back(i);

    size_t n_pos = static_cast<size_t>(std::llround(fraction * static_cast<double>(total)));
    n_pos = std::min(n_pos, valid_idx.size());

    // partial Fisher-Yates picks the positive subset uniformly
    for (size_t i = 0; i < n_pos; ++i) {
        const size_t j = i + static_cast<size_t>(rng.uniform_int(
                                 static_cast<int64_t>(valid_idx.size() - i)));
        std::swap(valid_idx[i], valid_idx[j]);
    }

    std::vector<uint8_t> is_pos(total, 0);
    PixelSampleSet out;
    out.positives.reserve(n_pos);
    for (size_t i = 0; i < n_pos; ++i) {
        const size_t idx = valid_idx[i];
        is_pos[idx] = 1;
        const int y = static_cast<int>(idx) / w, x = static_cast<int>(idx) % w;
        out.positives.push_back({{x, y}, {corr.tx[idx], corr.ty[idx]}});
    }

    out.negatives.reserve(total - n_pos);
    for (size_t idx = 0; idx < total; ++idx) {
        if (is_pos[idx]) continue;
        const int y = static_cast<int>(idx) / w, x = static_cast<int>(idx) % w;
        const bool has_target = corr.valid[idx] != 0;
        Pixel r;
        while (true) {
            r.x = static_cast<int>(rng.uniform_int(w));
            r.y = static_cast<int>(rng.uniform_int(h));
            if (!has_target) break;
            const int dx = std::abs(r.x - corr.tx[idx]);
            const int dy = std::abs(r.y - corr.ty[idx]);
            if (std::max(dx, dy) > exclusion_radius) break;
        }
        out.negatives.push_back({{x, y}, r});
    }
    out.realized_fraction = total > 0 ? static_cast<double>(n_pos) / total : 0.0;
    return out;
}

}  // namespace oxel
