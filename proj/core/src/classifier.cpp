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

#include "oxel/classifier.hpp"

#include <cmath>

namespace oxel {

void ClassifierConfig::validate() const {
    OXEL_CHECK_CONFIG(feature_dim > 0, "classifier config: feature_dim must be positive");
    OXEL_CHECK_CONFIG(!hidden.empty(), "classifier config: hidden widths must be non-empty");
    for (auto h : hidden)
        OXEL_CHECK_CONFIG(h > 0, "classifier config: hidden widths must be positive");
}

PixelClassifier::PixelClassifier(ClassifierConfig cfg, uint64_t init_seed)
    : cfg_(std::move(cfg)) {
    cfg_.validate();
    const int64_t d = cfg_.feature_dim;
    in_norm_ = nn::LayerNorm(reg_, "in_norm", d, /*with_bias=*/false);
    q_ = nn::LinearLayer(reg_, "q", d, d);
    k_ = nn::LinearLayer(reg_, "k", d, d);
    v_ = nn::LinearLayer(reg_, "v", d, d);
    q_norm_ = nn::LayerNorm(reg_, "q_norm", d, /*with_bias=*/true);
    k_norm_ = nn::LayerNorm(reg_, "k_norm", d, /*with_bias=*/true);
    int64_t prev = d;
    for (size_t i = 0; i < cfg_.hidden.size(); ++i) {
        mlp_.emplace_back(reg_, "mlp." + std::to_string(i), prev, cfg_.hidden[i]);
        prev = cfg_.hidden[i];
    }
    mlp_.emplace_back(reg_, "mlp.out", prev, 1);

    Rng rng(derive_seed(init_seed, "classifier-init"));
    q_.init(rng);
    k_.init(rng);
    v_.init(rng);
    for (auto& l : mlp_) l.init(rng);
}

Tensor PixelClassifier::pixel_logits(const Tensor& x) const {
    OXEL_CHECK_SHAPE(x.shape().size() == 3 && x.dim(2) == cfg_.feature_dim,
                     "classifier: input must be (N, P, D) with matching D");
    const int64_t n = x.dim(0), p = x.dim(1);
    Tensor h = in_norm_.forward(x);
    Tensor q = q_norm_.forward(q_.forward(h));
    Tensor k = k_norm_.forward(k_.forward(h));
    Tensor v = v_.forward(h);
    q = scale(q, 1.f / std::sqrt(static_cast<float>(cfg_.feature_dim)));
    Tensor att = softmax_lastdim(bmm(q, k, false, /*trans_b=*/true));  // (N, P, P)
    Tensor a = bmm(att, v);                                            // (N, P, D)
    for (size_t i = 0; i + 1 < mlp_.size(); ++i) a = silu(mlp_[i].forward(a));
    a = mlp_.back().forward(a);  // (N, P, 1)
    return reshape_copy(a, {n, p});
}

Tensor PixelClassifier::image_logits(const Tensor& x) const {
    return mean_dim1(pixel_logits(x));
}

PixelClassifier::Prediction PixelClassifier::predict_image(const FeatureMap& features) const {
    OXEL_CHECK_SHAPE(features.depth == cfg_.feature_dim,
                     "predict_image: feature depth mismatch");
    NoGradGuard ng;
    const int64_t p = static_cast<int64_t>(features.height) * features.width;
    std::vector<float> buf(features.v.size());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(features.v[i]);
    Tensor x = Tensor::from_vector({1, p, cfg_.feature_dim}, std::move(buf));
    Tensor logits = pixel_logits(x);
    Prediction out;
    out.logits.assign(logits.data(), logits.data() + p);
    double mean = 0.0;
    for (double z : out.logits) mean += z;
    mean /= static_cast<double>(p);
    out.probability = 1.0 / (1.0 + std::exp(-mean));
    return out;
}

}  // namespace oxel
