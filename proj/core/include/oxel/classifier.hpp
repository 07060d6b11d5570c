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

#include "oxel/loss.hpp"
#include "oxel/nn.hpp"

namespace oxel {

struct ClassifierConfig {
    int64_t feature_dim = 32;
    std::vector<int64_t> hidden{150, 100, 50};

    void validate() const;
};

/// Permutation-invariant single-head attention classifier over per-pixel
/// features: normalized inputs project to Q/K/V, Q and K are re-normalized and
/// scaled by 1/sqrt(D), full softmax attention over all pixels (no positional
/// encodings), then a small MLP maps each attended pixel to one logit. The
/// image logit is the uniform mean of pixel logits.
class PixelClassifier {
public:
    PixelClassifier(ClassifierConfig cfg, uint64_t init_seed);

    /// x is (N, P, D) pixel features; returns (N, P) pixel logits.
    Tensor pixel_logits(const Tensor& x) const;
    /// Convenience: (N, P, D) -> (N) image logits.
    Tensor image_logits(const Tensor& x) const;

    struct Prediction {
        double probability = 0.0;
        std::vector<double> logits;  // one per pixel, row-major
    };
    /// Inference on a single feature map (no graph).
    Prediction predict_image(const FeatureMap& features) const;

    nn::ParamRegistry& params() { return reg_; }
    const nn::ParamRegistry& params() const { return reg_; }
    int64_t param_count() const { return reg_.total_params(); }
    const ClassifierConfig& config() const { return cfg_; }

private:
    ClassifierConfig cfg_;
    nn::ParamRegistry reg_;
    nn::LayerNorm in_norm_;          // scale only
    nn::LinearLayer q_, k_, v_;
    nn::LayerNorm q_norm_, k_norm_;  // scale and shift
    std::vector<nn::LinearLayer> mlp_;
};

}  // namespace oxel
