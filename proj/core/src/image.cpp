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

#include "oxel/image.hpp"

#include <algorithm>
#include <cmath>

namespace oxel {

std::array<float, 3> bilinear_sample(const Image& img, double x, double y, float fill) {
    const int h = img.height(), w = img.width();
    if (x < 0.0 || y < 0.0 || x > w - 1.0 || y > h - 1.0) return {fill, fill, fill};
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = x - x0, fy = y - y0;
    std::array<float, 3> out{};
    for (int c = 0; c < img.channels() && c < 3; ++c) {
        const double top = img.at(y0, x0, c) * (1.0 - fx) + img.at(y0, x1, c) * fx;
        const double bot = img.at(y1, x0, c) * (1.0 - fx) + img.at(y1, x1, c) * fx;
        out[c] = static_cast<float>(top * (1.0 - fy) + bot * fy);
    }
    return out;
}

Image resize_bilinear(const Image& img, int out_h, int out_w) {
    OXEL_CHECK(out_h >= 1 && out_w >= 1, "resize_bilinear: output dims must be >= 1");
    Image out(out_h, out_w, img.channels());
    const double sy = out_h > 1 ? double(img.height() - 1) / (out_h - 1) : 0.0;
    const double sx = out_w > 1 ? double(img.width() - 1) / (out_w - 1) : 0.0;
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            const double srcy = y * sy, srcx = x * sx;
            const int y0 = static_cast<int>(std::floor(srcy));
            const int x0 = static_cast<int>(std::floor(srcx));
            const int y1 = std::min(y0 + 1, img.height() - 1);
            const int x1 = std::min(x0 + 1, img.width() - 1);
            const double fy = srcy - y0, fx = srcx - x0;
            for (int c = 0; c < img.channels(); ++c) {
                const double top = img.at(y0, x0, c) * (1 - fx) + img.at(y0, x1, c) * fx;
                const double bot = img.at(y1, x0, c) * (1 - fx) + img.at(y1, x1, c) * fx;
                out.at(y, x, c) = static_cast<float>(top * (1 - fy) + bot * fy);
            }
        }
    }
    return out;
}

std::array<float, 3> rgb_to_hsv(const std::array<float, 3>& rgb) {
    const float r = rgb[0], g = rgb[1], b = rgb[2];
    const float mx = std::max({r, g, b});
    const float mn = std::min({r, g, b});
    const float d = mx - mn;
    float h = 0.f;
    if (d > 0.f) {
        if (mx == r)
            h = std::fmod((g - b) / d, 6.f);
        else if (mx == g)
            h = (b - r) / d + 2.f;
        else
            h = (r - g) / d + 4.f;
        h /= 6.f;
        if (h < 0.f) h += 1.f;
    }
    const float s = mx > 0.f ? d / mx : 0.f;
    return {h, s, mx};
}

std::array<float, 3> hsv_to_rgb(const std::array<float, 3>& hsv) {
    const float h = hsv[0] * 6.f, s = hsv[1], v = hsv[2];
    const int i = static_cast<int>(std::floor(h)) % 6;
    const float f = h - std::floor(h);
    const float p = v * (1.f - s);
    const float q = v * (1.f - s * f);
    const float t = v * (1.f - s * (1.f - f));
    switch ((i + 6) % 6) {
        case 0: return {v, t, p};
        case 1: return {q, v, p};
        case 2: return {p, v, t};
        case 3: return {p, q, v};
        case 4: return {t, p, v};
        default: return {v, p, q};
    }
}

Image apply_hue_saturation(const Image& img, double hue_shift, double sat_scale) {
    Image out(img.height(), img.width(), img.channels());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            auto hsv = rgb_to_hsv({img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2)});
            double h = hsv[0] + hue_shift;
            h -= std::floor(h);  // wrap into [0, 1)
            hsv[0] = static_cast<float>(h);
            hsv[1] = static_cast<float>(std::clamp(hsv[1] * sat_scale, 0.0, 1.0));
            auto rgb = hsv_to_rgb(hsv);
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = std::clamp(rgb[c], 0.f, 1.f);
        }
    }
    return out;
}

}  // namespace oxel
