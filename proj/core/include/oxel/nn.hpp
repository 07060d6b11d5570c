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

#include <string>
#include <vector>

#include "oxel/tensor.hpp"

namespace oxel::nn {

/// Ordered, named parameter collection shared by a model, the optimizer and
/// the checkpoint writer.
class ParamRegistry {
public:
    Tensor make(const std::string& name, Shape shape);
    const std::vector<std::pair<std::string, Tensor>>& items() const { return items_; }
    std::vector<std::pair<std::string, Tensor>>& items() { return items_; }
    int64_t total_params() const;
    Tensor* find(const std::string& name);
    void zero_grad();

private:
    std::vector<std::pair<std::string, Tensor>> items_;
};

void init_xavier_uniform(Tensor& w, int64_t fan_in, int64_t fan_out, Rng& rng);
void init_constant(Tensor& t, float v);

struct Conv {
    Tensor w, b;
    int ksize = 3;

    Conv() = default;
    Conv(ParamRegistry& reg, const std::string& prefix, int64_t cin, int64_t cout, int k,
         bool bias = true);
    void init(Rng& rng);
    Tensor forward(const Tensor& x) const { return conv2d(x, w, b, ksize); }
    int64_t cin() const { return w.dim(1) / (ksize * ksize); }
};

/// One-group normalization over (C,H,W) with per-channel scale and shift.
struct Norm {
    Tensor gamma, beta;

    Norm() = default;
    Norm(ParamRegistry& reg, const std::string& prefix, int64_t channels);
    Tensor forward(const Tensor& x) const { return group_norm_all(x, gamma, beta); }
};

struct LinearLayer {
    Tensor w, b;

    LinearLayer() = default;
    LinearLayer(ParamRegistry& reg, const std::string& prefix, int64_t din, int64_t dout,
                bool bias = true);
    void init(Rng& rng);
    Tensor forward(const Tensor& x) const { return linear(x, w, b); }
};

/// Last-dim normalization; scale-only when with_bias is false.
struct LayerNorm {
    Tensor gamma, beta;

    LayerNorm() = default;
    LayerNorm(ParamRegistry& reg, const std::string& prefix, int64_t dim, bool with_bias);
    Tensor forward(const Tensor& x) const { return layer_norm_lastdim(x, gamma, beta); }
};

/// Pre-norm residual block: norm-SiLU-conv3, norm-SiLU-[dropout]-conv3, +x.
struct ResBlock {
    Norm norm1, norm2;
    Conv conv1, conv2;
    float dropout_rate = 0.f;

    ResBlock() = default;
    ResBlock(ParamRegistry& reg, const std::string& prefix, int64_t channels, float dropout);
    void init(Rng& rng);
    Tensor forward(const Tensor& x, bool train, Rng* rng) const;
};

/// Bottleneck self-attention with a channel-mixing tail:
///   x += proj(attend(qkv(norm1(x))));  x += mlp2(silu(mlp1(norm2(x)))).
struct AttentionBlock {
    Norm norm1, norm2;
    Conv qkv;    // 1x1, no bias, 3C outputs
    Conv proj;   // 1x1, bias
    Conv mlp1, mlp2;

    AttentionBlock() = default;
    AttentionBlock(ParamRegistry& reg, const std::string& prefix, int64_t channels);
    void init(Rng& rng);
    Tensor forward(const Tensor& x) const;
};

}  // namespace oxel::nn
