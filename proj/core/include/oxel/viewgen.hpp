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

#include <array>
#include <optional>

#include "oxel/image.hpp"
#include "oxel/rng.hpp"

namespace oxel {

/// 3x3 projective transform on pixel coordinates (x, y, 1).
struct Homography {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    // generating parameters, kept for inspection
    double rotation = 0.0;
    double scale_x = 1.0, scale_y = 1.0;
    double skew_x = 0.0, skew_y = 0.0;
    double translate_x = 0.0, translate_y = 0.0;

    /// Maps continuous (x, y); throws on vanishing homogeneous coordinate.
    std::array<double, 2> apply(double x, double y) const;
    Homography inverse() const;
    double determinant() const;

    static Homography compose(const Homography& a, const Homography& b);  // a after b
    static Homography identity() { return {}; }
};

struct TransformConfig {
    double rotation_max = 25.0 * 3.14159265358979323846 / 180.0;  // radians, +/-
    double scale_min = 0.8, scale_max = 1.2;
    double skew_max = 0.2;              // +/-
    double translate_frac = 0.1;        // +/- fraction of image size
    double hue_max = 0.1;               // +/- fraction of hue circle
    double saturation_max = 0.3;        // scale in [1-s, 1+s]
    bool jitter_both_views = true;
    int height = 32, width = 32;

    void validate() const;
};

/// Per-pixel mapping from view-1 pixels to view-2 pixels plus validity.
struct CorrespondenceMap {
    int height = 0, width = 0;
    std::vector<int32_t> tx, ty;      // target coordinates, indexed row-major
    std::vector<uint8_t> valid;

    size_t idx(int y, int x) const { return static_cast<size_t>(y) * width + x; }
    Pixel target(int y, int x) const {
        const size_t i = idx(y, x);
        return {tx[i], ty[i]};
    }
    bool is_valid(int y, int x) const { return valid[idx(y, x)] != 0; }
    size_t valid_count() const;
};

struct ViewPair {
    Image view1, view2;
    CorrespondenceMap corr;
    Homography homography;
};

/// Draws transform parameters uniformly from the configured ranges and
/// assembles the matrix about the image center plus a random translation.
Homography sample_homography(Rng& rng, const TransformConfig& cfg);

/// Rounds the continuous image of every pixel half-away-from-zero; a pixel is
/// valid iff its continuous image lies inside [0, W-1] x [0, H-1].
CorrespondenceMap build_correspondence(const Homography& h, int height, int width);

/// view1 = jitter(image), view2 = warp(jitter(image)); independent jitters.
/// Warping uses inverse mapping with bilinear sampling.
ViewPair make_view_pair(const Image& image, Rng& rng, const TransformConfig& cfg);

/// Inverse-mapped bilinear warp: out(q) = image(h^-1(q)).
Image warp_image(const Image& image, const Homography& h);

}  // namespace oxel
