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

#include "oxel/nn.hpp"

#include <cmath>

namespace oxel::nn {

namespace {
constexpr float kBiasInit = 1e-6f;
}

Tensor ParamRegistry::make(const std::string& name, Shape shape) {
    for (const auto& [n, t] : items_)
        OXEL_CHECK(n != name, "duplicate parameter name: " + name);
    Tensor t = Tensor::zeros(std::move(shape), /*requires_grad=*/true);
    items_.emplace_back(name, t);
    return t;
}

int64_t ParamRegistry::total_params() const {
    int64_t n = 0;
    for (const auto& [name, t] : items_) n += t.numel();
    return n;
}

Tensor* ParamRegistry::find(const std::string& name) {
    for (auto& [n, t] : items_)
        if (n == name) return &t;
    return nullptr;
}

void ParamRegistry::zero_grad() {
    for (auto& [n, t] : items_) t.zero_grad();
}

void init_xavier_uniform(Tensor& w, int64_t fan_in, int64_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (int64_t i = 0; i < w.numel(); ++i)
        w.data()[i] = static_cast<float>(rng.uniform(-limit, limit));
}

void init_constant(Tensor& t, float v) {
    for (int64_t i = 0; i < t.numel(); ++i) t.data()[i] = v;
}

Conv::Conv(ParamRegistry& reg, const std::string& prefix, int64_t cin, int64_t cout, int k,
           bool bias)
    : ksize(k) {
    w = reg.make(prefix + ".w", {cout, cin * k * k});
    if (bias) b = reg.make(prefix + ".b", {cout});
}

void Conv::init(Rng& rng) {
    const int64_t cout = w.dim(0);
    const int64_t fan_in = w.dim(1);  // cin * k * k
    init_xavier_uniform(w, fan_in, cout * ksize * ksize, rng);
    if (b.defined()) init_constant(b, kBiasInit);
}

Norm::Norm(ParamRegistry& reg, const std::string& prefix, int64_t channels) {
    gamma = reg.make(prefix + ".g", {channels});
    beta = reg.make(prefix + ".b", {channels});
    init_constant(gamma, 1.f);
    init_constant(beta, 0.f);
}

LinearLayer::LinearLayer(ParamRegistry& reg, const std::string& prefix, int64_t din,
                         int64_t dout, bool bias) {
    w = reg.make(prefix + ".w", {din, dout});
    if (bias) b = reg.make(prefix + ".b", {dout});
}

void LinearLayer::init(Rng& rng) {
    init_xavier_uniform(w, w.dim(0), w.dim(1), rng);
    if (b.defined()) init_constant(b, kBiasInit);
}

LayerNorm::LayerNorm(ParamRegistry& reg, const std::string& prefix, int64_t dim,
                     bool with_bias) {
    gamma = reg.make(prefix + ".g", {dim});
    init_constant(gamma, 1.f);
    if (with_bias) {
        beta = reg.make(prefix + ".b", {dim});
        init_constant(beta, 0.f);
    }
}

ResBlock::ResBlock(ParamRegistry& reg, const std::string& prefix, int64_t channels,
                   float dropout)
    : norm1(reg, prefix + ".n1", channels),
      norm2(reg, prefix + ".n2", channels),
      conv1(reg, prefix + ".c1", channels, channels, 3),
      conv2(reg, prefix + ".c2", channels, channels, 3),
      dropout_rate(dropout) {}

void ResBlock::init(Rng& rng) {
    conv1.init(rng);
    conv2.init(rng);
}

Tensor ResBlock::forward(const Tensor& x, bool train, Rng* rng) const {
    Tensor h = conv1.forward(silu(norm1.forward(x)));
    h = silu(norm2.forward(h));
    if (train && dropout_rate > 0.f) {
        OXEL_CHECK(rng != nullptr, "resblock: dropout requires an rng in training mode");
        h = dropout(h, dropout_rate, *rng);
    }
    h = conv2.forward(h);
    return add(x, h);
}

AttentionBlock::AttentionBlock(ParamRegistry& reg, const std::string& prefix, int64_t channels)
    : norm1(reg, prefix + ".n1", channels),
      norm2(reg, prefix + ".n2", channels),
      qkv(reg, prefix + ".qkv", channels, 3 * channels, 1, /*bias=*/false),
      proj(reg, prefix + ".proj", channels, channels, 1),
      mlp1(reg, prefix + ".m1", channels, channels, 1),
      mlp2(reg, prefix + ".m2", channels, channels, 1) {}

void AttentionBlock::init(Rng& rng) {
    qkv.init(rng);
    proj.init(rng);
    mlp1.init(rng);
    mlp2.init(rng);
}

Tensor AttentionBlock::forward(const Tensor& x) const {
    const int64_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    const int64_t s = h * w;
    Tensor t = qkv.forward(norm1.forward(x));  // (N, 3C, H, W)
    Tensor q = reshape_copy(slice_channels(t, 0, c), {n, c, s});
    Tensor k = reshape_copy(slice_channels(t, c, 2 * c), {n, c, s});
    Tensor v = reshape_copy(slice_channels(t, 2 * c, 3 * c), {n, c, s});
    // attention weights: rows are query pixels
    Tensor att = softmax_lastdim(
        scale(bmm(q, k, /*trans_a=*/true, /*trans_b=*/false),
              1.f / std::sqrt(static_cast<float>(c))));        // (N, S, S)
    Tensor out = bmm(v, att, false, /*trans_b=*/true);          // (N, C, S)
    out = reshape_copy(out, {n, c, h, w});
    Tensor y = add(x, proj.forward(out));
    return add(y, mlp2.forward(silu(mlp1.forward(norm2.forward(y)))));
}

}  // namespace oxel::nn
