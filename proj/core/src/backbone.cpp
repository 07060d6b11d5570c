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

#include "oxel/backbone.hpp"

namespace oxel {

void BackboneConfig::validate() const {
    OXEL_CHECK_CONFIG(!widths.empty() && widths.size() == blocks.size(),
                      "backbone config: widths and blocks must be equal-length and non-empty");
    for (size_t i = 0; i < widths.size(); ++i)
        OXEL_CHECK_CONFIG(widths[i] >= 1 && blocks[i] >= 1,
                          "backbone config: widths and block counts must be >= 1");
    OXEL_CHECK_CONFIG(out_channels > 3, "backbone config: out_channels must exceed 3");
    OXEL_CHECK_CONFIG(dropout >= 0.f && dropout < 1.f, "backbone config: dropout in [0, 1)");
}

BackboneConfig BackboneConfig::colored_mnist() {
    BackboneConfig cfg;
    cfg.widths = {32, 64, 64};
    cfg.blocks = {1, 2, 2};
    cfg.out_channels = 32;
    return cfg;
}

BackboneConfig BackboneConfig::scenes3d() {
    BackboneConfig cfg;
    cfg.widths = {16, 16, 32, 32, 64};
    cfg.blocks = {1, 1, 1, 2, 4};
    cfg.out_channels = 32;
    return cfg;
}

Backbone::Backbone(BackboneConfig cfg, uint64_t init_seed) : cfg_(std::move(cfg)) {
    cfg_.validate();
    const int s = cfg_.stages();
    const auto& w = cfg_.widths;
    auto drop = [&](int stage) { return stage >= s - 2 ? cfg_.dropout : 0.f; };

    stem_ = nn::Conv(reg_, "stem", 3, w[0], 3);
    enc_.resize(static_cast<size_t>(s));
    for (int i = 0; i < s; ++i)
        for (int64_t j = 0; j < cfg_.blocks[static_cast<size_t>(i)]; ++j)
            enc_[static_cast<size_t>(i)].blocks.emplace_back(
                reg_, "enc." + std::to_string(i) + "." + std::to_string(j),
                w[static_cast<size_t>(i)], drop(i));
    for (int i = 0; i + 1 < s; ++i)
        down_.emplace_back(reg_, "down." + std::to_string(i), w[static_cast<size_t>(i)],
                           w[static_cast<size_t>(i) + 1], 1);

    const int64_t wb = w.back();
    mid1_ = nn::ResBlock(reg_, "mid.0", wb, cfg_.dropout);
    attn_ = nn::AttentionBlock(reg_, "mid.attn", wb);
    mid2_ = nn::ResBlock(reg_, "mid.1", wb, cfg_.dropout);

    dec_.resize(static_cast<size_t>(s));
    for (int i = s - 1; i >= 0; --i) {
        auto& stage = dec_[static_cast<size_t>(i)];
        const int64_t nb = cfg_.blocks[static_cast<size_t>(i)] + 1;
        for (int64_t j = 0; j < nb; ++j) {
            const std::string prefix =
                "dec." + std::to_string(i) + "." + std::to_string(j);
            DecoderBlock db;
            db.block = nn::ResBlock(reg_, prefix, w[static_cast<size_t>(i)], drop(i));
            db.gate = reg_.make(prefix + ".gate", {w[static_cast<size_t>(i)]});
            nn::init_constant(db.gate, 1.f);
            stage.blocks.push_back(std::move(db));
        }
        if (i > 0) {
            up_norm_.emplace_back(reg_, "up." + std::to_string(i) + ".n",
                                  w[static_cast<size_t>(i)]);
            up_.emplace_back(reg_, "up." + std::to_string(i) + ".c",
                             w[static_cast<size_t>(i)], w[static_cast<size_t>(i) - 1], 1);
        }
    }

    head_norm_ = nn::Norm(reg_, "head.n", w[0]);
    head_ = nn::Conv(reg_, "head.c", w[0], cfg_.out_channels, 3);

    Rng rng(derive_seed(init_seed, "backbone-init"));
    stem_.init(rng);
    for (auto& st : enc_)
        for (auto& b : st.blocks) b.init(rng);
    for (auto& d : down_) d.init(rng);
    mid1_.init(rng);
    attn_.init(rng);
    mid2_.init(rng);
    for (auto& st : dec_)
        for (auto& b : st.blocks) b.block.init(rng);
    for (auto& u : up_) u.init(rng);
    head_.init(rng);
}

Tensor Backbone::forward(const Tensor& x, bool train, Rng* rng) const {
    OXEL_CHECK_SHAPE(x.shape().size() == 4 && x.dim(1) == 3,
                     "backbone: input must be (N, 3, H, W)");
    const int s = cfg_.stages();
    const int64_t div = int64_t(1) << (s - 1);
    OXEL_CHECK_SHAPE(x.dim(2) % div == 0 && x.dim(3) % div == 0,
                     "backbone: spatial dims must be divisible by 2^(stages-1)");

    std::vector<Tensor> skips;
    Tensor h = stem_.forward(x);
    skips.push_back(h);
    for (int i = 0; i < s; ++i) {
        for (const auto& b : enc_[static_cast<size_t>(i)].blocks) {
            h = b.forward(h, train, rng);
            skips.push_back(h);
        }
        if (i + 1 < s) {
            h = down_[static_cast<size_t>(i)].forward(avg_pool2(h));
            skips.push_back(h);
        }
    }

    h = mid1_.forward(h, train, rng);
    if (cfg_.bottleneck_attention) h = attn_.forward(h);
    h = mid2_.forward(h, train, rng);

    size_t up_idx = 0;
    for (int i = s - 1; i >= 0; --i) {
        for (const auto& db : dec_[static_cast<size_t>(i)].blocks) {
            h = skip_add_gated(h, skips.back(), db.gate);
            skips.pop_back();
            h = db.block.forward(h, train, rng);
        }
        if (i > 0) {
            h = upsample_nearest2(
                up_[up_idx].forward(up_norm_[up_idx].forward(h)));
            ++up_idx;
        }
    }
    OXEL_CHECK(skips.empty(), "backbone: skip bookkeeping mismatch");
    return head_.forward(silu(head_norm_.forward(h)));
}

std::vector<std::string> Backbone::attention_param_names() const {
    std::vector<std::string> names;
    for (const auto& [name, t] : reg_.items())
        if (name.rfind("mid.attn", 0) == 0) names.push_back(name);
    return names;
}

}  // namespace oxel
