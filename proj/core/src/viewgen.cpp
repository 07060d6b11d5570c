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

#include "oxel/viewgen.hpp"

#include <cmath>

namespace oxel {

namespace {

std::array<double, 9> matmul3(const std::array<double, 9>& a, const std::array<double, 9>& b) {
    std::array<double, 9> c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) c[i * 3 + j] += a[i * 3 + k] * b[k * 3 + j];
    return c;
}

std::array<double, 9> translation(double dx, double dy) {
    return {1, 0, dx, 0, 1, dy, 0, 0, 1};
}

/// Rounds half away from zero, matching std::round semantics on doubles.
int32_t round_half_away(double v) { return static_cast<int32_t>(std::lround(v)); }

}  // namespace

std::array<double, 2> Homography::apply(double x, double y) const {
    const double u = m[0] * x + m[1] * y + m[2];
    const double v = m[3] * x + m[4] * y + m[5];
    const double w = m[6] * x + m[7] * y + m[8];
    OXEL_CHECK(std::abs(w) > 1e-12, "homography: point maps to infinity");
    return {u / w, v / w};
}

double Homography::determinant() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Homography Homography::inverse() const {
    const double det = determinant();
    OXEL_CHECK(std::abs(det) > 1e-8, "homography: singular matrix");
    const auto& a = m;
    Homography out;
    out.m = {(a[4] * a[8] - a[5] * a[7]) / det, (a[2] * a[7] - a[1] * a[8]) / det,
             (a[1] * a[5] - a[2] * a[4]) / det, (a[5] * a[6] - a[3] * a[8]) / det,
             (a[0] * a[8] - a[2] * a[6]) / det, (a[2] * a[3] - a[0] * a[5]) / det,
             (a[3] * a[7] - a[4] * a[6]) / det, (a[1] * a[6] - a[0] * a[7]) / det,
             (a[0] * a[4] - a[1] * a[3]) / det};
    return out;
}

Homography Homography::compose(const Homography& a, const Homography& b) {
    Homography out;
    out.m = matmul3(a.m, b.m);
    return out;
}

void TransformConfig::validate() const {
    const double pi_2 = 3.14159265358979323846 / 2.0;
    OXEL_CHECK_CONFIG(std::isfinite(rotation_max) && rotation_max >= 0.0 && rotation_max <= pi_2,
                      "transform config: rotation range must be within [0, pi/2]");
    OXEL_CHECK_CONFIG(std::isfinite(scale_min) && std::isfinite(scale_max) &&
                          scale_min > 0.0 && scale_max >= scale_min,
                      "transform config: scale range must be positive");
    OXEL_CHECK_CONFIG(std::isfinite(skew_max) && skew_max >= 0.0,
                      "transform config: skew range must be finite and >= 0");
    OXEL_CHECK_CONFIG(std::isfinite(translate_frac) && translate_frac >= 0.0,
                      "transform config: translation range must be finite and >= 0");
    OXEL_CHECK_CONFIG(hue_max >= 0.0 && hue_max <= 0.5, "transform config: hue range in [0, 0.5]");
    OXEL_CHECK_CONFIG(saturation_max >= 0.0 && saturation_max < 1.0,
                      "transform config: saturation range in [0, 1)");
    OXEL_CHECK_CONFIG(height >= 1 && width >= 1, "transform config: dims must be >= 1");
}

Homography sample_homography(Rng& rng, const TransformConfig& cfg) {
    cfg.validate();
    Homography h;
    h.rotation = rng.uniform(-cfg.rotation_max, cfg.rotation_max);
    h.scale_x = rng.uniform(cfg.scale_min, cfg.scale_max);
    h.scale_y = rng.uniform(cfg.scale_min, cfg.scale_max);
    h.skew_x = rng.uniform(-cfg.skew_max, cfg.skew_max);
    h.skew_y = rng.uniform(-cfg.skew_max, cfg.skew_max);
    h.translate_x = rng.uniform(-cfg.translate_frac, cfg.translate_frac) * cfg.width;
    h.translate_y = rng.uniform(-cfg.translate_frac, cfg.translate_frac) * cfg.height;

    const double cx = (cfg.width - 1) / 2.0, cy = (cfg.height - 1) / 2.0;
    const double c = std::cos(h.rotation), s = std::sin(h.rotation);
    const std::array<double, 9> rot{c, -s, 0, s, c, 0, 0, 0, 1};
    const std::array<double, 9> scale{h.scale_x, 0, 0, 0, h.scale_y, 0, 0, 0, 1};
    const std::array<double, 9> skew{1, h.skew_x, 0, h.skew_y, 1, 0, 0, 0, 1};

    // about the center, then a random translation on top
    auto m = matmul3(rot, scale);
    m = matmul3(m, skew);
    m = matmul3(translation(cx + h.translate_x, cy + h.translate_y), m);
    h.m = matmul3(m, translation(-cx, -cy));
    OXEL_CHECK(std::abs(h.determinant()) > 1e-8, "sample_homography: degenerate transform");
    return h;
}

CorrespondenceMap build_correspondence(const Homography& h, int height, int width) {
    OXEL_CHECK(height >= 1 && width >= 1, "build_correspondence: dims must be >= 1");
    CorrespondenceMap map;
    map.height = height;
    map.width = width;
    const size_t n = static_cast<size_t>(height) * width;
    map.tx.resize(n);
    map.ty.resize(n);
    map.valid.resize(n);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const auto q = h.apply(x, y);
            const size_t i = map.idx(y, x);
            map.tx[i] = round_half_away(q[0]);
            map.ty[i] = round_half_away(q[1]);
            map.valid[i] = (q[0] >= 0.0 && q[0] <= width - 1.0 && q[1] >= 0.0 &&
                            q[1] <= height - 1.0)
                               ? 1
                               : 0;
        }
    }
    return map;
}

size_t CorrespondenceMap::valid_count() const {
    size_t n = 0;
    for (auto v : valid) n += v;
    return n;
}

Image warp_image(const Image& image, const Homography& h) {
    const Homography inv = h.inverse();
    Image out(image.height(), image.width(), image.channels());
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            const auto src = inv.apply(x, y);
            const auto rgb = bilinear_sample(image, src[0], src[1]);
            for (int c = 0; c < out.channels(); ++c) out.at(y, x, c) = rgb[c];
        }
    }
    return out;
}

ViewPair make_view_pair(const Image& image, Rng& rng, const TransformConfig& cfg) {
    cfg.validate();
    ViewPair pair;
    const double hue1 = rng.uniform(-cfg.hue_max, cfg.hue_max);
    const double sat1 = rng.uniform(1.0 - cfg.saturation_max, 1.0 + cfg.saturation_max);
    const double hue2 = rng.uniform(-cfg.hue_max, cfg.hue_max);
    const double sat2 = rng.uniform(1.0 - cfg.saturation_max, 1.0 + cfg.saturation_max);
    pair.view1 = cfg.jitter_both_views ? apply_hue_saturation(image, hue1, sat1) : image;
    pair.homography = sample_homography(rng, cfg);
    pair.view2 = warp_image(apply_hue_saturation(image, hue2, sat2), pair.homography);
    pair.corr = build_correspondence(pair.homography, image.height(), image.width());
    return pair;
}

}  // namespace oxel
