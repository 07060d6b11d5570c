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

#include <span>
#include <vector>

#include "oxel/common.hpp"
#include "oxel/sampling.hpp"

namespace oxel {

enum class Norm { one, two, infinity };

Norm norm_from_string(const std::string& s);
std::string norm_to_string(Norm n);

/// Per-pixel descriptor grid, H x W x D row-major, D > 3.
struct FeatureMap {
    int height = 0, width = 0, depth = 0;
    std::vector<double> v;

    FeatureMap() = default;
    FeatureMap(int h, int w, int d)
        : height(h), width(w), depth(d), v(static_cast<size_t>(h) * w * d, 0.0) {
        OXEL_CHECK_SHAPE(d > 3, "feature map depth must exceed 3");
    }

    std::span<const double> pixel(int y, int x) const {
        return {v.data() + (static_cast<size_t>(y) * width + x) * depth,
                static_cast<size_t>(depth)};
    }
    std::span<double> pixel(int y, int x) {
        return {v.data() + (static_cast<size_t>(y) * width + x) * depth,
                static_cast<size_t>(depth)};
    }
    bool all_finite() const;
};

struct LossConfig {
    double lambda = 1.0;
    Norm norm = Norm::infinity;
    double positive_fraction = 0.125;

    void validate() const;
};

/// ||a - b||_p. For p = infinity, the max over channel absolute differences.
double pixel_distance(std::span<const double> a, std::span<const double> b, Norm norm);

/// Matched-pair term mean(d + d^2) over positives plus random-pair term
/// mean(-d + d^2) over negatives; an empty set contributes zero.
double within_loss(const FeatureMap& f1, const FeatureMap& f2, const PixelSampleSet& samples,
                   Norm norm);

/// mean(-c + c^2) over all pixels, c the per-pixel distance at equal coords.
double between_loss(const FeatureMap& fa, const FeatureMap& fb, Norm norm);

double total_loss(double within, double between, double lambda);

/// Analytic-gradient companions. Gradients are accumulated (+=) into g1/g2,
/// scaled by `scale`; buffers must match the feature-map element counts.
double within_loss_grad(const FeatureMap& f1, const FeatureMap& f2,
                        const PixelSampleSet& samples, Norm norm, double scale,
                        std::span<double> g1, std::span<double> g2);
double between_loss_grad(const FeatureMap& fa, const FeatureMap& fb, Norm norm, double scale,
                         std::span<double> ga, std::span<double> gb);

}  // namespace oxel
