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
#include <vector>

#include "oxel/common.hpp"

namespace oxel {

/// Dense H x W x C image, row-major, values in [0, 1] by convention.
class Image {
public:
    Image() = default;
    Image(int height, int width, int channels = 3, float fill = 0.f)
        : h_(height), w_(width), c_(channels),
          v_(static_cast<size_t>(height) * width * channels, fill) {}

    int height() const { return h_; }
    int width() const { return w_; }
    int channels() const { return c_; }
    size_t size() const { return v_.size(); }

    float& at(int y, int x, int c) { return v_[(static_cast<size_t>(y) * w_ + x) * c_ + c]; }
    float at(int y, int x, int c) const { return v_[(static_cast<size_t>(y) * w_ + x) * c_ + c]; }

    float* data() { return v_.data(); }
    const float* data() const { return v_.data(); }
    std::vector<float>& values() { return v_; }
    const std::vector<float>& values() const { return v_; }

    bool operator==(const Image&) const = default;

private:
    int h_ = 0;
    int w_ = 0;
    int c_ = 0;
    std::vector<float> v_;
};

/// Bilinear sample at continuous (x, y); out-of-range reads return `fill`.
std::array<float, 3> bilinear_sample(const Image& img, double x, double y, float fill = 0.f);

/// Bilinear resize to (out_h, out_w), align-corners convention.
Image resize_bilinear(const Image& img, int out_h, int out_w);

std::array<float, 3> rgb_to_hsv(const std::array<float, 3>& rgb);
std::array<float, 3> hsv_to_rgb(const std::array<float, 3>& hsv);

/// Hue offset is a fraction of the hue circle (wraps); saturation is scaled
/// and the result clipped to [0, 1] per channel.
Image apply_hue_saturation(const Image& img, double hue_shift, double sat_scale);

}  // namespace oxel
