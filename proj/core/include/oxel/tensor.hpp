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

#include <functional>
#include <memory>
#include <vector>

#include "oxel/common.hpp"
#include "oxel/rng.hpp"

namespace oxel {

using Shape = std::vector<int64_t>;

int64_t shape_numel(const Shape& s);

/// Reverse-mode autodiff tensor with shared value storage. Graphs are built
/// dynamically; backward() walks creation order, which is a topological order.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, float value, bool requires_grad = false);
    static Tensor from_data(Shape shape, const float* data, bool requires_grad = false);
    static Tensor from_vector(Shape shape, std::vector<float> data, bool requires_grad = false);

    bool defined() const { return n_ != nullptr; }
    const Shape& shape() const;
    int64_t numel() const;
    int64_t dim(int i) const;

    float* data();
    const float* data() const;

    bool requires_grad() const;
    /// Gradient buffer (allocated zero-filled on demand).
    std::vector<float>& grad();
    void zero_grad();

    /// Runs reverse-mode accumulation from this scalar tensor.
    void backward();

    /// Value copy detached from the graph.
    Tensor detach() const;

    float item() const;

    // --- internal node plumbing (used by op implementations) ---
    struct Node {
        Shape shape;
        std::vector<float> val;
        std::vector<float> grad;
        bool requires_grad = false;
        uint64_t id = 0;
        std::vector<std::shared_ptr<Node>> parents;
        std::function<void(Node&)> backfn;

        void ensure_grad() {
            if (grad.empty()) grad.assign(val.size(), 0.f);
        }
    };
    std::shared_ptr<Node> node() const { return n_; }
    explicit Tensor(std::shared_ptr<Node> n) : n_(std::move(n)) {}

private:
    std::shared_ptr<Node> n_;
};

/// While alive, newly built ops record no graph (inference mode).
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;

private:
    bool prev_;
};

bool grad_enabled();

// ---- elementwise & shape ----
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, float s);
Tensor silu(const Tensor& x);
Tensor sigmoid_t(const Tensor& x);
Tensor reshape_copy(const Tensor& x, Shape s);
Tensor dropout(const Tensor& x, float p, Rng& rng);

// ---- conv stack (NCHW) ----
/// x (N,C,H,W), w (Cout, Cin*k*k), b (Cout) optional; stride 1, same padding.
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b, int ksize);
Tensor avg_pool2(const Tensor& x);
Tensor upsample_nearest2(const Tensor& x);
/// One-group normalization over (C,H,W) per sample; per-channel affine.
Tensor group_norm_all(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                      float eps = 1e-5f);
/// y = x + gate_c * skip, gate shaped (C).
Tensor skip_add_gated(const Tensor& x, const Tensor& skip, const Tensor& gate);

// ---- dense / attention stack ----
/// x (..., Din) -> (..., Dout); w (Din, Dout), b (Dout) optional.
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);
/// Normalizes the last dim per row; gamma/beta (D), beta may be undefined.
Tensor layer_norm_lastdim(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                          float eps = 1e-5f);
/// a (B,M,K) x b (B,K,N) -> (B,M,N), with optional transposes of the 2D tails.
Tensor bmm(const Tensor& a, const Tensor& b, bool trans_a = false, bool trans_b = false);
Tensor softmax_lastdim(const Tensor& x);
/// (N,C,H,W) -> (N, H*W, C)
Tensor chw_to_pixels(const Tensor& x);
/// NCHW channel slice [c0, c1), returned as (N, c1-c0, H, W).
Tensor slice_channels(const Tensor& x, int64_t c0, int64_t c1);

// ---- reductions / losses ----
Tensor mean_all(const Tensor& x);
/// x (N,P) -> (N), mean over the second dim.
Tensor mean_dim1(const Tensor& x);
/// Numerically stable mean of BCE-with-logits against fixed targets.
Tensor bce_with_logits_mean(const Tensor& logits, const std::vector<float>& targets);

}  // namespace oxel
