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

#include "oxel/nn.hpp"

namespace oxel {

struct BackboneConfig {
    std::vector<int64_t> widths{32, 64, 64};
    std::vector<int64_t> blocks{1, 2, 2};
    int64_t out_channels = 32;          // per-pixel descriptor depth, > 3
    bool bottleneck_attention = false;  // apply attention in forward
    float dropout = 0.1f;               // used in the deepest two stages

    void validate() const;
    int stages() const { return static_cast<int>(widths.size()); }

    /// 32x32 image configuration (three stages).
    static BackboneConfig colored_mnist();
    /// 64x64 rendered-scene configuration (five stages).
    static BackboneConfig scenes3d();
};

/// U-Net-style encoder-decoder producing an out_channels-deep descriptor per
/// pixel at input resolution. Decoder blocks fuse stacked encoder features by
/// gated addition. The bottleneck attention sub-block always exists in the
/// parameter set; the config flag controls whether forward applies it.
class Backbone {
public:
    Backbone(BackboneConfig cfg, uint64_t init_seed);

    /// x is (N, 3, H, W) with H, W divisible by 2^(stages-1). Returns
    /// (N, D, H, W). Training mode enables dropout (rng required).
    Tensor forward(const Tensor& x, bool train = false, Rng* dropout_rng = nullptr) const;

    nn::ParamRegistry& params() { return reg_; }
    const nn::ParamRegistry& params() const { return reg_; }
    int64_t param_count() const { return reg_.total_params(); }
    const BackboneConfig& config() const { return cfg_; }

    /// Names of the attention sub-block parameters (zero-grad when disabled).
    std::vector<std::string> attention_param_names() const;

private:
    struct DecoderBlock {
        nn::ResBlock block;
        Tensor gate;
    };
    struct Stage {
        std::vector<nn::ResBlock> blocks;
    };
    struct DecoderStage {
        std::vector<DecoderBlock> blocks;
    };

    BackboneConfig cfg_;
    nn::ParamRegistry reg_;
    nn::Conv stem_;
    std::vector<Stage> enc_;
    std::vector<nn::Conv> down_;          // aligns widths between stages
    nn::ResBlock mid1_, mid2_;
    nn::AttentionBlock attn_;
    std::vector<DecoderStage> dec_;       // deepest first
    std::vector<nn::Norm> up_norm_;
    std::vector<nn::Conv> up_;
    nn::Norm head_norm_;
    nn::Conv head_;
};

}  // namespace oxel
