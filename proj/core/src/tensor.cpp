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

#include "oxel/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <unordered_set>

#include "oxel/blas.hpp"

namespace oxel {

namespace {

std::atomic<uint64_t> g_node_id{1};
thread_local bool g_grad_enabled = true;

using NodePtr = std::shared_ptr<Tensor::Node>;

NodePtr new_node(Shape shape) {
    auto n = std::make_shared<Tensor::Node>();
    n->shape = std::move(shape);
    n->val.resize(static_cast<size_t>(shape_numel(n->shape)));
    n->id = g_node_id.fetch_add(1, std::memory_order_relaxed);
    return n;
}

/// Wires parents+backfn only when gradients are both enabled and needed.
Tensor finish(NodePtr n, std::vector<NodePtr> parents,
              std::function<void(Tensor::Node&)> backfn) {
    bool need = false;
    if (g_grad_enabled)
        for (const auto& p : parents)
            if (p && p->requires_grad) need = true;
    if (need) {
        n->requires_grad = true;
        n->parents = std::move(parents);
        n->backfn = std::move(backfn);
    }
    return Tensor(std::move(n));
}

void accumulate(const NodePtr& p, const float* g, size_t n) {
    if (!p || !p->requires_grad) return;
    p->ensure_grad();
    for (size_t i = 0; i < n; ++i) p->grad[i] += g[i];
}

}  // namespace

int64_t shape_numel(const Shape& s) {
    int64_t n = 1;
    for (auto d : s) n *= d;
    return n;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    auto n = new_node(std::move(shape));
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
}

Tensor Tensor::full(Shape shape, float value, bool requires_grad) {
    Tensor t = zeros(std::move(shape), requires_grad);
    std::fill(t.n_->val.begin(), t.n_->val.end(), value);
    return t;
}

Tensor Tensor::from_data(Shape shape, const float* data, bool requires_grad) {
    Tensor t = zeros(std::move(shape), requires_grad);
    std::copy(data, data + t.numel(), t.n_->val.begin());
    return t;
}

Tensor Tensor::from_vector(Shape shape, std::vector<float> data, bool requires_grad) {
    OXEL_CHECK_SHAPE(static_cast<int64_t>(data.size()) == shape_numel(shape),
                     "from_vector: data size does not match shape");
    auto n = new_node(std::move(shape));
    n->val = std::move(data);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
}

const Shape& Tensor::shape() const {
    OXEL_CHECK(n_, "tensor is undefined");
    return n_->shape;
}
int64_t Tensor::numel() const { return static_cast<int64_t>(n_->val.size()); }
int64_t Tensor::dim(int i) const { return shape().at(static_cast<size_t>(i)); }
float* Tensor::data() { return n_->val.data(); }
const float* Tensor::data() const { return n_->val.data(); }
bool Tensor::requires_grad() const { return n_ && n_->requires_grad; }

std::vector<float>& Tensor::grad() {
    OXEL_CHECK(n_, "tensor is undefined");
    n_->ensure_grad();
    return n_->grad;
}

void Tensor::zero_grad() {
    if (n_ && !n_->grad.empty()) std::fill(n_->grad.begin(), n_->grad.end(), 0.f);
}

float Tensor::item() const {
    OXEL_CHECK_SHAPE(numel() == 1, "item(): tensor is not a scalar");
    return n_->val[0];
}

Tensor Tensor::detach() const {
    auto n = new_node(n_->shape);
    n->val = n_->val;
    return Tensor(std::move(n));
}

void Tensor::backward() {
    OXEL_CHECK(n_, "backward on undefined tensor");
    OXEL_CHECK_SHAPE(numel() == 1, "backward requires a scalar loss");
    // creation ids give a topological order: parents always precede children
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<Node*> stack{n_.get()};
    seen.insert(n_.get());
    while (!stack.empty()) {
        Node* cur = stack.back();
        stack.pop_back();
        order.push_back(cur);
        for (const auto& p : cur->parents)
            if (p && p->requires_grad && seen.insert(p.get()).second) stack.push_back(p.get());
    }
    std::sort(order.begin(), order.end(), [](Node* a, Node* b) { return a->id > b->id; });
    n_->ensure_grad();
    n_->grad[0] += 1.f;
    for (Node* node : order)
        if (node->backfn && !node->grad.empty()) node->backfn(*node);
}

// ---------------------------------------------------------------------------
// elementwise
// ---------------------------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
    OXEL_CHECK_SHAPE(a.shape() == b.shape(), "add: shape mismatch");
    auto n = new_node(a.shape());
    const size_t m = n->val.size();
    const float* pa = a.data();
    const float* pb = b.data();
    for (size_t i = 0; i < m; ++i) n->val[i] = pa[i] + pb[i];
    return finish(std::move(n), {a.node(), b.node()}, [m](Tensor::Node& self) {
        accumulate(self.parents[0], self.grad.data(), m);
        accumulate(self.parents[1], self.grad.data(), m);
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    OXEL_CHECK_SHAPE(a.shape() == b.shape(), "sub: shape mismatch");
    auto n = new_node(a.shape());
    const size_t m = n->val.size();
    for (size_t i = 0; i < m; ++i) n->val[i] = a.data()[i] - b.data()[i];
    return finish(std::move(n), {a.node(), b.node()}, [m](Tensor::Node& self) {
        accumulate(self.parents[0], self.grad.data(), m);
        if (self.parents[1] && self.parents[1]->requires_grad) {
            auto& p = self.parents[1];
            p->ensure_grad();
            for (size_t i = 0; i < m; ++i) p->grad[i] -= self.grad[i];
        }
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    OXEL_CHECK_SHAPE(a.shape() == b.shape(), "mul: shape mismatch");
    auto n = new_node(a.shape());
    const size_t m = n->val.size();
    for (size_t i = 0; i < m; ++i) n->val[i] = a.data()[i] * b.data()[i];
    return finish(std::move(n), {a.node(), b.node()}, [m](Tensor::Node& self) {
        auto& pa = self.parents[0];
        auto& pb = self.parents[1];
        if (pa && pa->requires_grad) {
            pa->ensure_grad();
            for (size_t i = 0; i < m; ++i) pa->grad[i] += self.grad[i] * pb->val[i];
        }
        if (pb && pb->requires_grad) {
            pb->ensure_grad();
            for (size_t i = 0; i < m; ++i) pb->grad[i] += self.grad[i] * pa->val[i];
        }
    });
}

Tensor scale(const Tensor& x, float s) {
    auto n = new_node(x.shape());
    const size_t m = n->val.size();
    for (size_t i = 0; i < m; ++i) n->val[i] = x.data()[i] * s;
    return finish(std::move(n), {x.node()}, [m, s](Tensor::Node& self) {
        auto& p = self.parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (size_t i = 0; i < m; ++i) p->grad[i] += self.grad[i] * s;
    });
}

Tensor silu(const Tensor& x) {
    auto n = new_node(x.shape());
    const size_t m = n->val.size();
    const float* px = x.data();
    for (size_t i = 0; i < m; ++i) {
        const float s = 1.f / (1.f + std::exp(-px[i]));
        n->val[i] = px[i] * s;
    }
    return finish(std::move(n), {x.node()}, [m](Tensor::Node& self) {
        auto& p = self.parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (size_t i = 0; i < m; ++i) {
            const float v = p->val[i];
            const float s = 1.f / (1.f + std::exp(-v));
            p->grad[i] += self.grad[i] * s * (1.f + v * (1.f - s));
        }
    });
}

Tensor sigmoid_t(const Tensor& x) {
    auto n = new_node(x.shape());
    const size_t m = n->val.size();
    for (size_t i = 0; i < m; ++i) n->val[i] = 1.f / (1.f + std::exp(-x.data()[i]));
    return finish(std::move(n), {x.node()}, [m](Tensor::Node& self) {
        auto& p = self.parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (size_t i = 0; i < m; ++i) {
            const float y = self.val[i];
            p->grad[i] += self.grad[i] * y * (1.f - y);
        }
    });
}

Tensor reshape_copy(const Tensor& x, Shape s) {
    OXEL_CHECK_SHAPE(shape_numel(s) == x.numel(), "reshape: element count mismatch");
    auto n = new_node(std::move(s));
    n->val = x.node()->val;
    const size_t m = n->val.size();
    return finish(std::move(n), {x.node()},
                  [m](Tensor::Node& self) { accumulate(self.parents[0], self.grad.data(), m); });
}

Tensor dropout(const Tensor& x, float p, Rng& rng) {
    if (p <= 0.f) return x;
    OXEL_CHECK_CONFIG(p < 1.f, "dropout: rate must be in [0, 1)");
    auto n = new_node(x.shape());
    const size_t m = n->val.size();
    auto mask = std::make_shared<std::vector<float>>(m);
    const float keep = 1.f - p;
    for (size_t i = 0; i < m; ++i)
        (*mask)[i] = rng.uniform() < keep ? 1.f / keep : 0.f;
    for (size_t i = 0; i < m; ++i) n->val[i] = x.data()[i] * (*mask)[i];
    return finish(std::move(n), {x.node()}, [m, mask](Tensor::Node& self) {
        auto& par = self.parents[0];
        if (!par->requires_grad) return;
        par->ensure_grad();
        for (size_t i = 0; i < m; ++i) par->grad[i] += self.grad[i] * (*mask)[i];
    });
}

// ---------------------------------------------------------------------------
// conv stack
// ---------------------------------------------------------------------------

namespace {

/// k=3, pad=1 patch gather: cols (C*9, H*W).
void im2col3(const float* x, int c, int h, int w, float* cols) {
    const int hw = h * w;
    for (int ch = 0; ch < c; ++ch) {
        const float* plane = x + static_cast<size_t>(ch) * hw;
        for (int ky = 0; ky < 3; ++ky) {
            for (int kx = 0; kx < 3; ++kx) {
                float* row = cols + (static_cast<size_t>(ch) * 9 + ky * 3 + kx) * hw;
                for (int y = 0; y < h; ++y) {
                    const int sy = y + ky - 1;
                    float* dst = row + static_cast<size_t>(y) * w;
                    if (sy < 0 || sy >= h) {
                        std::fill(dst, dst + w, 0.f);
                        continue;
                    }
                    const float* src = plane + static_cast<size_t>(sy) * w;
                    for (int x2 = 0; x2 < w; ++x2) {
                        const int sx = x2 + kx - 1;
                        dst[x2] = (sx >= 0 && sx < w) ? src[sx] : 0.f;
                    }
                }
            }
        }
    }
}

/// Scatter-add transpose of im2col3.
void col2im3(const float* cols, int c, int h, int w, float* x) {
    const int hw = h * w;
    for (int ch = 0; ch < c; ++ch) {
        float* plane = x + static_cast<size_t>(ch) * hw;
        for (int ky = 0; ky < 3; ++ky) {
            for (int kx = 0; kx < 3; ++kx) {
                const float* row = cols + (static_cast<size_t>(ch) * 9 + ky * 3 + kx) * hw;
                for (int y = 0; y < h; ++y) {
                    const int sy = y + ky - 1;
                    if (sy < 0 || sy >= h) continue;
                    float* dst = plane + static_cast<size_t>(sy) * w;
                    const float* src = row + static_cast<size_t>(y) * w;
                    for (int x2 = 0; x2 < w; ++x2) {
                        const int sx = x2 + kx - 1;
                        if (sx >= 0 && sx < w) dst[sx] += src[x2];
                    }
                }
            }
        }
    }
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b, int ksize) {
    OXEL_CHECK_SHAPE(x.shape().size() == 4, "conv2d: input must be NCHW");
    OXEL_CHECK_SHAPE(ksize == 1 || ksize == 3, "conv2d: kernel must be 1 or 3");
    const int64_t n = x.dim(0), c = x.dim(1), h = x.dim(2), ww = x.dim(3);
    const int64_t cout = w.dim(0);
    OXEL_CHECK_SHAPE(w.dim(1) == c * ksize * ksize, "conv2d: weight shape mismatch");
    const bool has_bias = b.defined();
    if (has_bias) OXEL_CHECK_SHAPE(b.numel() == cout, "conv2d: bias shape mismatch");

    auto out = new_node({n, cout, h, ww});
    const int64_t hw = h * ww;
    const int64_t ckk = c * ksize * ksize;

#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) {
        const float* xi = x.data() + i * c * hw;
        float* oi = out->val.data() + i * cout * hw;
        if (ksize == 1) {
            blas::sgemm(false, false, cout, hw, c, 1.f, w.data(), c, xi, hw, 0.f, oi, hw);
        } else {
            std::vector<float> cols(static_cast<size_t>(ckk) * hw);
            im2col3(xi, static_cast<int>(c), static_cast<int>(h), static_cast<int>(ww),
                    cols.data());
            blas::sgemm(false, false, cout, hw, ckk, 1.f, w.data(), ckk, cols.data(), hw, 0.f,
                        oi, hw);
        }
        if (has_bias)
            for (int64_t oc = 0; oc < cout; ++oc) {
                const float bias = b.data()[oc];
                float* row = oi + oc * hw;
                for (int64_t p = 0; p < hw; ++p) row[p] += bias;
            }
    }

    std::vector<NodePtr> parents{x.node(), w.node()};
    if (has_bias) parents.push_back(b.node());
    return finish(std::move(out), std::move(parents),
                  [n, c, h, ww, cout, ksize, hw, ckk, has_bias](Tensor::Node& self) {
        auto& px = self.parents[0];
        auto& pw = self.parents[1];
        const bool need_x = px->requires_grad;
        const bool need_w = pw->requires_grad;
        if (need_x) px->ensure_grad();
        if (need_w) pw->ensure_grad();
        // per-image weight-gradient partials reduced in index order
        std::vector<float> wpart;
        if (need_w) wpart.assign(static_cast<size_t>(n) * cout * ckk, 0.f);

#pragma omp parallel for schedule(static)
        for (int64_t i = 0; i < n; ++i) {
            const float* gi = self.grad.data() + i * cout * hw;
            const float* xi = px->val.data() + i * c * hw;
            if (ksize == 1) {
                if (need_w)
                    blas::sgemm(false, true, cout, c, hw, 1.f, gi, hw, xi, hw, 0.f,
                                wpart.data() + i * cout * ckk, c);
                if (need_x)
                    blas::sgemm(true, false, c, hw, cout, 1.f, pw->val.data(), c, gi, hw, 1.f,
                                px->grad.data() + i * c * hw, hw);
            } else {
                std::vector<float> cols(static_cast<size_t>(ckk) * hw);
                im2col3(xi, static_cast<int>(c), static_cast<int>(h), static_cast<int>(ww),
                        cols.data());
                if (need_w)
                    blas::sgemm(false, true, cout, ckk, hw, 1.f, gi, hw, cols.data(), hw, 0.f,
                                wpart.data() + i * cout * ckk, ckk);
                if (need_x) {
                    std::vector<float> dcols(static_cast<size_t>(ckk) * hw);
                    blas::sgemm(true, false, ckk, hw, cout, 1.f, pw->val.data(), ckk, gi, hw,
                                0.f, dcols.data(), hw);
                    col2im3(dcols.data(), static_cast<int>(c), static_cast<int>(h),
                            static_cast<int>(ww), px->grad.data() + i * c * hw);
                }
            }
        }
        if (need_w) {
            const size_t sz = static_cast<size_t>(cout) * ckk;
            for (int64_t i = 0; i < n; ++i) {
                const float* part = wpart.data() + i * sz;
                for (size_t j = 0; j < sz; ++j) pw->grad[j] += part[j];
            }
        }
        if (has_bias && self.parents[2]->requires_grad) {
            auto& pb = self.parents[2];
            pb->ensure_grad();
            for (int64_t i = 0; i < n; ++i)
                for (int64_t oc = 0; oc < cout; ++oc) {
                    const float* row = self.grad.data() + (i * cout + oc) * hw;
                    float acc = 0.f;
                    for (int64_t p = 0; p < hw; ++p) acc += row[p];
                    pb->grad[oc] += acc;
                }
        }
    });
}

Tensor avg_pool2(const Tensor& x) {
    const int64_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    OXEL_CHECK_SHAPE(h % 2 == 0 && w % 2 == 0, "avg_pool2: odd spatial dims");
    const int64_t oh = h / 2, ow = w / 2;
    auto out = new_node({n, c, oh, ow});
    for (int64_t i = 0; i < n * c; ++i) {
        const float* src = x.data() + i * h * w;
        float* dst = out->val.data() + i * oh * ow;
        for (int64_t y = 0; y < oh; ++y)
            for (int64_t xx = 0; xx < ow; ++xx)
                dst[y * ow + xx] = 0.25f * (src[(2 * y) * w + 2 * xx] +
                                            src[(2 * y) * w + 2 * xx + 1] +
                                            src[(2 * y + 1) * w + 2 * xx] +
                                            src[(2 * y + 1) * w + 2 * xx + 1]);
    }
    return finish(std::move(out), {x.node()}, [n, c, h, w, oh, ow](Tensor::Node& self) {
        auto& p = self.parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (int64_t i = 0; i < n * c; ++i) {
            float* dst = p->grad.data() + i * h * w;
            const float* g = self.grad.data() + i * oh * ow;
            for (int64_t y = 0; y < oh; ++y)
                for (int64_t xx = 0; xx < ow; ++xx) {
                    const float v = 0.25f * g[y * ow + xx];
                    dst[(2 * y) * w + 2 * xx] += v;
                    dst[(2 * y) * w + 2 * xx + 1] += v;
                    dst[(2 * y + 1) * w + 2 * xx] += v;
                    dst[(2 * y + 1) * w + 2 * xx + 1] += v;
                }
        }
    });
}

Tensor upsample_nearest2(const Tensor& x) {
    const int64_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    const int64_t oh = h * 2, ow = w * 2;
    auto out = new_node({n, c, oh, ow});
    for (int64_t i = 0; i < n * c; ++i) {
        const float* src = x.data() + i * h * w;
        float* dst = out->val.data() + i * oh * ow;
        for (int64_t y = 0; y < oh; ++y)
            for (int64_t xx = 0; xx < ow; ++xx) dst[y * ow + xx] = src[(y / 2) * w + xx / 2];
    }
    return finish(std::move(out), {x.node()}, [n, c, h, w, oh, ow](Tensor::Node& self) {
        auto& p = self.parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (int64_t i = 0; i < n * c; ++i) {
            float* dst = p->grad.data() + i * h * w;
            const float* g = self.grad.data() + i * oh * ow;
            for (int64_t y = 0; y < oh; ++y)
                for (int64_t xx = 0; xx < ow; ++xx) dst[(y / 2) * w + xx / 2] += g[y * ow + xx];
        }
    });
}

Tensor group_norm_all(const Tensor& x, const Tensor& gamma, const Tensor& beta, float eps) {
    const int64_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    OXEL_CHECK_SHAPE(gamma.numel() == c && beta.numel() == c, "group_norm: affine shape");
    const int64_t m = c * h * w;
    auto out = new_node(x.shape());
    auto stats = std::make_shared<std::vector<float>>(2 * n);  // (mu, inv_sigma) per sample
    for (int64_t i = 0; i < n; ++i) {
        const float* xi = x.data() + i * m;
        double mu = 0.0;
        for (int64_t j = 0; j < m; ++j) mu += xi[j];
        mu /= static_cast<double>(m);
        double var = 0.0;
        for (int64_t j = 0; j < m; ++j) {
            const double d = xi[j] - mu;
            var += d * d;
        }
        var /= static_cast<double>(m);
        const float inv = 1.f / std::sqrt(static_cast<float>(var) + eps);
        (*stats)[2 * i] = static_cast<float>(mu);
        (*stats)[2 * i + 1] = inv;
        float* oi = out->val.data() + i * m;
        for (int64_t ch = 0; ch < c; ++ch) {
            const float g = gamma.data()[ch], bta = beta.data()[ch];
            const float* src = xi + ch * h * w;
            float* dst = oi + ch * h * w;
            for (int64_t p = 0; p < h * w; ++p)
                dst[p] = (src[p] - static_cast<float>(mu)) * inv * g + bta;
        }
    }
    return finish(std::move(out), {x.node(), gamma.node(), beta.node()},
                  [n, c, h, w, m, stats](Tensor::Node& self) {
        auto& px = self.parents[0];
        auto& pg = self.parents[1];
        auto& pb = self.parents[2];
        const int64_t hw = h * w;
        for (int64_t i = 0; i < n; ++i) {
            const float mu = (*stats)[2 * i], inv = (*stats)[2 * i + 1];
            const float* gy = self.grad.data() + i * m;
            const float* xi = px->val.data() + i * m;
            if (pg->requires_grad || pb->requires_grad) {
                pg->ensure_grad();
                pb->ensure_grad();
                for (int64_t ch = 0; ch < c; ++ch) {
                    double dg = 0.0, db = 0.0;
                    const float* gyc = gy + ch * hw;
                    const float* xc = xi + ch * hw;
                    for (int64_t p = 0; p < hw; ++p) {
                        dg += gyc[p] * (xc[p] - mu) * inv;
                        db += gyc[p];
                    }
                    pg->grad[ch] += static_cast<float>(dg);
                    pb->grad[ch] += static_cast<float>(db);
                }
            }
            if (px->requires_grad) {
                px->ensure_grad();
                // dL/dxhat with affine folded in, then the norm backward
                double sum_g = 0.0, sum_gx = 0.0;
                for (int64_t ch = 0; ch < c; ++ch) {
                    const float gm = pg->val[ch];
                    const float* gyc = gy + ch * hw;
                    const float* xc = xi + ch * hw;
                    for (int64_t p = 0; p < hw; ++p) {
                        const double gg = static_cast<double>(gyc[p]) * gm;
                        sum_g += gg;
                        sum_gx += gg * ((xc[p] - mu) * inv);
                    }
                }
                const double mg = sum_g / static_cast<double>(m);
                const double mgx = sum_gx / static_cast<double>(m);
                float* dx = px->grad.data() + i * m;
                for (int64_t ch = 0; ch < c; ++ch) {
                    const float gm = pg->val[ch];
                    const float* gyc = gy + ch * hw;
                    const float* xc = xi + ch * hw;
                    float* dxc = dx + ch * hw;
                    for (int64_t p = 0; p < hw; ++p) {
                        const double xh = (xc[p] - mu) * inv;
                        dxc[p] += static_cast<float>(
                            inv * (static_cast<double>(gyc[p]) * gm - mg - xh * mgx));
                    }
                }
            }
        }
    });
}

Tensor skip_add_gated(const Tensor& x, const Tensor& skip, const Tensor& gate) {
    OXEL_CHECK_SHAPE(x.shape() == skip.shape(), "skip_add_gated: shape mismatch");
    const int64_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
    OXEL_CHECK_SHAPE(gate.numel() == c, "skip_add_gated: gate must be per-channel");
    auto out = new_node(x.shape());
    for (int64_t i = 0; i < n; ++i)
        for (int64_t ch = 0; ch < c; ++ch) {
            const float g = gate.data()[ch];
            const size_t off = static_cast<size_t>((i * c + ch) * hw);
            for (int64_t p = 0; p < hw; ++p)
                out->val[off + p] = x.data()[off + p] + g * skip.data()[off + p];
        }
    return finish(std::move(out), {x.node(), skip.node(), gate.node()},
                  [n, c, hw](Tensor::Node& self) {
        auto& px = self.parents[0];
        auto& ps = self.parents[1];
        auto& pg = self.parents[2];
        if (px->requires_grad) accumulate(px, self.grad.data(), self.grad.size());
        if (ps->requires_grad) {
            ps->ensure_grad();
            for (int64_t i = 0; i < n; ++i)
                for (int64_t ch = 0; ch < c; ++ch) {
                    const float g = pg->val[ch];
                    const size_t off = static_cast<size_t>((i * c + ch) * hw);
                    for (int64_t p = 0; p < hw; ++p)
                        ps->grad[off + p] += g * self.grad[off + p];
                }
        }
        if (pg->requires_grad) {
            pg->ensure_grad();
            for (int64_t i = 0; i < n; ++i)
                for (int64_t ch = 0; ch < c; ++ch) {
                    const size_t off = static_cast<size_t>((i * c + ch) * hw);
                    double acc = 0.0;
                    for (int64_t p = 0; p < hw; ++p)
                        acc += static_cast<double>(self.grad[off + p]) * ps->val[off + p];
                    pg->grad[ch] += static_cast<float>(acc);
                }
        }
    });
}

// ---------------------------------------------------------------------------
// dense / attention
// ---------------------------------------------------------------------------

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
    const int64_t din = w.dim(0), dout = w.dim(1);
    OXEL_CHECK_SHAPE(x.shape().back() == din, "linear: input dim mismatch");
    const int64_t rows = x.numel() / din;
    Shape os = x.shape();
    os.back() = dout;
    auto out = new_node(std::move(os));
    blas::sgemm(false, false, rows, dout, din, 1.f, x.data(), din, w.data(), dout, 0.f,
                out->val.data(), dout);
    const bool has_bias = b.defined();
    if (has_bias) {
        OXEL_CHECK_SHAPE(b.numel() == dout, "linear: bias shape mismatch");
        for (int64_t r = 0; r < rows; ++r)
            for (int64_t j = 0; j < dout; ++j) out->val[r * dout + j] += b.data()[j];
    }
    std::vector<NodePtr> parents{x.node(), w.node()};
    if (has_bias) parents.push_back(b.node());
    return finish(std::move(out), std::move(parents),
                  [rows, din, dout, has_bias](Tensor::Node& self) {
        auto& px = self.parents[0];
        auto& pw = self.parents[1];
        if (px->requires_grad) {
            px->ensure_grad();
            blas::sgemm(false, true, rows, din, dout, 1.f, self.grad.data(), dout,
                        pw->val.data(), dout, 1.f, px->grad.data(), din);
        }
        if (pw->requires_grad) {
            pw->ensure_grad();
            blas::sgemm(true, false, din, dout, rows, 1.f, px->val.data(), din,
                        self.grad.data(), dout, 1.f, pw->grad.data(), dout);
        }
        if (has_bias && self.parents[2]->requires_grad) {
            auto& pb = self.parents[2];
            pb->ensure_grad();
            for (int64_t r = 0; r < rows; ++r)
                for (int64_t j = 0; j < dout; ++j) pb->grad[j] += self.grad[r * dout + j];
        }
    });
}

Tensor layer_norm_lastdim(const Tensor& x, const Tensor& gamma, const Tensor& beta, float eps) {
    const int64_t d = x.shape().back();
    OXEL_CHECK_SHAPE(gamma.numel() == d, "layer_norm: gamma shape");
    const bool has_beta = beta.defined();
    if (has_beta) OXEL_CHECK_SHAPE(beta.numel() == d, "layer_norm: beta shape");
    const int64_t rows = x.numel() / d;
    auto out = new_node(x.shape());
    auto stats = std::make_shared<std::vector<float>>(2 * rows);
    for (int64_t r = 0; r < rows; ++r) {
        const float* xr = x.data() + r * d;
        double mu = 0.0;
        for (int64_t j = 0; j < d; ++j) mu += xr[j];
        mu /= static_cast<double>(d);
        double var = 0.0;
        for (int64_t j = 0; j < d; ++j) {
            const double dd = xr[j] - mu;
            var += dd * dd;
        }
        var /= static_cast<double>(d);
        const float inv = 1.f / std::sqrt(static_cast<float>(var) + eps);
        (*stats)[2 * r] = static_cast<float>(mu);
        (*stats)[2 * r + 1] = inv;
        float* orow = out->val.data() + r * d;
        for (int64_t j = 0; j < d; ++j) {
            const float xh = (xr[j] - static_cast<float>(mu)) * inv;
            orow[j] = xh * gamma.data()[j] + (has_beta ? beta.data()[j] : 0.f);
        }
    }
    std::vector<NodePtr> parents{x.node(), gamma.node()};
    if (has_beta) parents.push_back(beta.node());
    return finish(std::move(out), std::move(parents),
                  [rows, d, has_beta, stats](Tensor::Node& self) {
        auto& px = self.parents[0];
        auto& pg = self.parents[1];
        for (int64_t r = 0; r < rows; ++r) {
            const float mu = (*stats)[2 * r], inv = (*stats)[2 * r + 1];
            const float* gy = self.grad.data() + r * d;
            const float* xr = px->val.data() + r * d;
            if (pg->requires_grad) {
                pg->ensure_grad();
                for (int64_t j = 0; j < d; ++j)
                    pg->grad[j] += gy[j] * (xr[j] - mu) * inv;
            }
            if (has_beta && self.parents[2]->requires_grad) {
                auto& pb = self.parents[2];
                pb->ensure_grad();
                for (int64_t j = 0; j < d; ++j) pb->grad[j] += gy[j];
            }
            if (px->requires_grad) {
                px->ensure_grad();
                double sg = 0.0, sgx = 0.0;
                for (int64_t j = 0; j < d; ++j) {
                    const double gg = static_cast<double>(gy[j]) * pg->val[j];
                    sg += gg;
                    sgx += gg * ((xr[j] - mu) * inv);
                }
                const double mg = sg / d, mgx = sgx / d;
                float* dx = px->grad.data() + r * d;
                for (int64_t j = 0; j < d; ++j) {
                    const double xh = (xr[j] - mu) * inv;
                    dx[j] += static_cast<float>(
                        inv * (static_cast<double>(gy[j]) * pg->val[j] - mg - xh * mgx));
                }
            }
        }
    });
}

Tensor bmm(const Tensor& a, const Tensor& b, bool trans_a, bool trans_b) {
    OXEL_CHECK_SHAPE(a.shape().size() == 3 && b.shape().size() == 3, "bmm: inputs must be 3-d");
    const int64_t batch = a.dim(0);
    OXEL_CHECK_SHAPE(b.dim(0) == batch, "bmm: batch mismatch");
    const int64_t m = trans_a ? a.dim(2) : a.dim(1);
    const int64_t k = trans_a ? a.dim(1) : a.dim(2);
    const int64_t k2 = trans_b ? b.dim(2) : b.dim(1);
    const int64_t nn = trans_b ? b.dim(1) : b.dim(2);
    OXEL_CHECK_SHAPE(k == k2, "bmm: inner dim mismatch");
    auto out = new_node({batch, m, nn});
    const int64_t sa = a.dim(1) * a.dim(2), sb = b.dim(1) * b.dim(2), sc = m * nn;
    const int64_t lda = a.dim(2), ldb = b.dim(2);

#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < batch; ++i)
        blas::sgemm(trans_a, trans_b, m, nn, k, 1.f, a.data() + i * sa, lda,
                    b.data() + i * sb, ldb, 0.f, out->val.data() + i * sc, nn);

    return finish(std::move(out), {a.node(), b.node()},
                  [batch, m, nn, k, sa, sb, sc, lda, ldb, trans_a, trans_b](Tensor::Node& self) {
        auto& pa = self.parents[0];
        auto& pb = self.parents[1];
        if (pa->requires_grad) pa->ensure_grad();
        if (pb->requires_grad) pb->ensure_grad();
#pragma omp parallel for schedule(static)
        for (int64_t i = 0; i < batch; ++i) {
            const float* gc = self.grad.data() + i * sc;
            const float* av = pa->val.data() + i * sa;
            const float* bv = pb->val.data() + i * sb;
            if (pa->requires_grad) {
                float* ga = pa->grad.data() + i * sa;
                if (!trans_a)
                    blas::sgemm(false, !trans_b, m, k, nn, 1.f, gc, nn, bv, ldb, 1.f, ga, lda);
                else
                    blas::sgemm(trans_b, true, k, m, nn, 1.f, bv, ldb, gc, nn, 1.f, ga, lda);
            }
            if (pb->requires_grad) {
                float* gb = pb->grad.data() + i * sb;
                if (!trans_b)
                    blas::sgemm(!trans_a, false, k, nn, m, 1.f, av, lda, gc, nn, 1.f, gb, ldb);
                else
                    blas::sgemm(true, trans_a, nn, k, m, 1.f, gc, nn, av, lda, 1.f, gb, ldb);
            }
        }
    });
}

Tensor softmax_lastdim(const Tensor& x) {
    const int64_t d = x.shape().back();
    const int64_t rows = x.numel() / d;
    auto out = new_node(x.shape());
    for (int64_t r = 0; r < rows; ++r) {
        const float* xr = x.data() + r * d;
        float* orow = out->val.data() + r * d;
        float mx = xr[0];
        for (int64_t j = 1; j < d; ++j) mx = std::max(mx, xr[j]);
        double sum = 0.0;
        for (int64_t j = 0; j < d; ++j) {
            orow[j] = std::exp(xr[j] - mx);
            sum += orow[j];
        }
        const float inv = static_cast<float>(1.0 / sum);
        for (int64_t j = 0; j < d; ++j) orow[j] *= inv;
    }
    return finish(std::move(out), {x.node()}, [rows, d](Tensor::Node& self) {
        auto& p = self.parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (int64_t r = 0; r < rows; ++r) {
            const float* y = self.val.data() + r * d;
            const float* gy = self.grad.data() + r * d;
            double dot = 0.0;
            for (int64_t j = 0; j < d; ++j) dot += static_cast<double>(gy[j]) * y[j];
            float* dx = p->grad.data() + r * d;
            for (int64_t j = 0; j < d; ++j)
                dx[j] += y[j] * (gy[j] - static_cast<float>(dot));
        }
    });
}

Tensor chw_to_pixels(const Tensor& x) {
    const int64_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
    auto out = new_node({n, hw, c});
    for (int64_t i = 0; i < n; ++i)
        for (int64_t ch = 0; ch < c; ++ch) {
            const float* src = x.data() + (i * c + ch) * hw;
            float* dst = out->val.data() + i * hw * c + ch;
            for (int64_t p = 0; p < hw; ++p) dst[p * c] = src[p];
        }
    return finish(std::move(out), {x.node()}, [n, c, hw](Tensor::Node& self) {
        auto& p = self.parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (int64_t i = 0; i < n; ++i)
            for (int64_t ch = 0; ch < c; ++ch) {
                float* dst = p->grad.data() + (i * c + ch) * hw;
                const float* src = self.grad.data() + i * hw * c + ch;
                for (int64_t q = 0; q < hw; ++q) dst[q] += src[q * c];
            }
    });
}

Tensor slice_channels(const Tensor& x, int64_t c0, int64_t c1) {
    OXEL_CHECK_SHAPE(x.shape().size() == 4, "slice_channels: input must be NCHW");
    const int64_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
    OXEL_CHECK_SHAPE(0 <= c0 && c0 < c1 && c1 <= c, "slice_channels: bad range");
    const int64_t cs = c1 - c0;
    auto out = new_node({n, cs, x.dim(2), x.dim(3)});
    for (int64_t i = 0; i < n; ++i)
        std::copy(x.data() + (i * c + c0) * hw, x.data() + (i * c + c1) * hw,
                  out->val.data() + i * cs * hw);
    return finish(std::move(out), {x.node()}, [n, c, c0, cs, hw](Tensor::Node& self) {
        auto& p = self.parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        for (int64_t i = 0; i < n; ++i) {
            const float* g = self.grad.data() + i * cs * hw;
            float* dst = p->grad.data() + (i * c + c0) * hw;
            for (int64_t j = 0; j < cs * hw; ++j) dst[j] += g[j];
        }
    });
}

Tensor mean_all(const Tensor& x) {
    auto out = new_node({1});
    const int64_t m = x.numel();
    double acc = 0.0;
    for (int64_t i = 0; i < m; ++i) acc += x.data()[i];
    out->val[0] = static_cast<float>(acc / static_cast<double>(m));
    return finish(std::move(out), {x.node()}, [m](Tensor::Node& self) {
        auto& p = self.parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        const float g = self.grad[0] / static_cast<float>(m);
        for (int64_t i = 0; i < m; ++i) p->grad[i] += g;
    });
}

Tensor mean_dim1(const Tensor& x) {
    OXEL_CHECK_SHAPE(x.shape().size() == 2, "mean_dim1: expects (N, P)");
    const int64_t n = x.dim(0), p = x.dim(1);
    auto out = new_node({n});
    for (int64_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int64_t j = 0; j < p; ++j) acc += x.data()[i * p + j];
        out->val[i] = static_cast<float>(acc / static_cast<double>(p));
    }
    return finish(std::move(out), {x.node()}, [n, p](Tensor::Node& self) {
        auto& par = self.parents[0];
        if (!par->requires_grad) return;
        par->ensure_grad();
        for (int64_t i = 0; i < n; ++i) {
            const float g = self.grad[i] / static_cast<float>(p);
            for (int64_t j = 0; j < p; ++j) par->grad[i * p + j] += g;
        }
    });
}

Tensor bce_with_logits_mean(const Tensor& logits, const std::vector<float>& targets) {
    const int64_t n = logits.numel();
    OXEL_CHECK_SHAPE(static_cast<int64_t>(targets.size()) == n, "bce: target count mismatch");
    auto out = new_node({1});
    double acc = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        const double z = logits.data()[i], y = targets[i];
        acc += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
    }
    out->val[0] = static_cast<float>(acc / static_cast<double>(n));
    auto tgt = std::make_shared<std::vector<float>>(targets);
    return finish(std::move(out), {logits.node()}, [n, tgt](Tensor::Node& self) {
        auto& p = self.parents[0];
        if (!p->requires_grad) return;
        p->ensure_grad();
        const float g = self.grad[0] / static_cast<float>(n);
        for (int64_t i = 0; i < n; ++i) {
            const float s = 1.f / (1.f + std::exp(-p->val[i]));
            p->grad[i] += g * (s - (*tgt)[i]);
        }
    });
}

}  // namespace oxel
