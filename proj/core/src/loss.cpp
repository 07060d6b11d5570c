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

#include "oxel/loss.hpp"

#include <cmath>

namespace oxel {

namespace {

constexpr double kL2Guard = 1e-12;  // keeps the l2 gradient finite at zero distance

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// Distance and, optionally, the subgradient of d with respect to (a - b).
double distance_impl(std::span<const double> a, std::span<const double> b, Norm norm,
                     std::span<double> ddelta) {
    OXEL_CHECK_SHAPE(a.size() == b.size(), "pixel_distance: vectors must have equal length");
    const size_t n = a.size();
    const bool want_grad = !ddelta.empty();
    switch (norm) {
        case Norm::one: {
            double d = 0.0;
            for (size_t c = 0; c < n; ++c) {
                const double delta = a[c] - b[c];
                d += std::abs(delta);
                if (want_grad) ddelta[c] = sign(delta);
            }
            return d;
        }
        case Norm::two: {
            double ss = 0.0;
            for (size_t c = 0; c < n; ++c) {
                const double delta = a[c] - b[c];
                ss += delta * delta;
            }
            const double d = std::sqrt(ss + kL2Guard);
            if (want_grad)
                for (size_t c = 0; c < n; ++c) ddelta[c] = (a[c] - b[c]) / d;
            return d;
        }
        case Norm::infinity: {
            double best = 0.0;
            size_t best_c = 0;
            for (size_t c = 0; c < n; ++c) {
                const double mag = std::abs(a[c] - b[c]);
                if (mag > best) {  // strict: ties resolve to the lowest channel
                    best = mag;
                    best_c = c;
                }
            }
            if (want_grad) {
                std::fill(ddelta.begin(), ddelta.end(), 0.0);
                ddelta[best_c] = sign(a[best_c] - b[best_c]);
            }
            return best;
        }
    }
    throw Error("pixel_distance: unknown norm");
}

size_t flat(const FeatureMap& f, const Pixel& p) {
    OXEL_CHECK_SHAPE(p.x >= 0 && p.x < f.width && p.y >= 0 && p.y < f.height,
                     "loss: sample coordinate out of bounds");
    return (static_cast<size_t>(p.y) * f.width + p.x) * f.depth;
}

}  // namespace

Norm norm_from_string(const std::string& s) {
    if (s == "l1" || s == "one" || s == "1") return Norm::one;
    if (s == "l2" || s == "two" || s == "2") return Norm::two;
    if (s == "linf" || s == "infinity" || s == "inf") return Norm::infinity;
    throw ConfigError("unknown norm selector: " + s);
}

std::string norm_to_string(Norm n) {
    switch (n) {
        case Norm::one: return "l1";
        case Norm::two: return "l2";
        case Norm::infinity: return "linf";
    }
    return "?";
}

bool FeatureMap::all_finite() const {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

void LossConfig::validate() const {
    OXEL_CHECK_CONFIG(lambda >= 0.0 && lambda <= 1.0, "loss config: lambda must be in [0, 1]");
    OXEL_CHECK_CONFIG(positive_fraction >= 0.0 && positive_fraction <= 1.0,
                      "loss config: positive fraction must be in [0, 1]");
}

double pixel_distance(std::span<const double> a, std::span<const double> b, Norm norm) {
    return distance_impl(a, b, norm, {});
}

double within_loss(const FeatureMap& f1, const FeatureMap& f2, const PixelSampleSet& samples,
                   Norm norm) {
    OXEL_CHECK_SHAPE(f1.height == f2.height && f1.width == f2.width && f1.depth == f2.depth,
                     "within_loss: shape mismatch");
    double pos = 0.0, neg = 0.0;
    for (const auto& pr : samples.positives) {
        const double d = pixel_distance(f1.pixel(pr.source.y, pr.source.x),
                                        f2.pixel(pr.target.y, pr.target.x), norm);
        pos += d + d * d;
    }
    for (const auto& pr : samples.negatives) {
        const double d = pixel_distance(f1.pixel(pr.source.y, pr.source.x),
                                        f2.pixel(pr.target.y, pr.target.x), norm);
        neg += -d + d * d;
    }
    double out = 0.0;
    if (!samples.positives.empty()) out += pos / static_cast<double>(samples.positives.size());
    if (!samples.negatives.empty()) out += neg / static_cast<double>(samples.negatives.size());
    return out;
}

double between_loss(const FeatureMap& fa, const FeatureMap& fb, Norm norm) {
    OXEL_CHECK_SHAPE(fa.height == fb.height && fa.width == fb.width && fa.depth == fb.depth,
                     "between_loss: shape mismatch");
    const size_t total = static_cast<size_t>(fa.height) * fa.width;
    if (total == 0) return 0.0;
    double acc = 0.0;
    for (int y = 0; y < fa.height; ++y)
        for (int x = 0; x < fa.width; ++x) {
            const double c = pixel_distance(fa.pixel(y, x), fb.pixel(y, x), norm);
            acc += -c + c * c;
        }
    return acc / static_cast<double>(total);
}

double total_loss(double within, double between, double lambda) {
    OXEL_CHECK_CONFIG(lambda >= 0.0 && lambda <= 1.0, "total_loss: lambda must be in [0, 1]");
    return lambda * within + (1.0 - lambda) * between;
}

double within_loss_grad(const FeatureMap& f1, const FeatureMap& f2,
                        const PixelSampleSet& samples, Norm norm, double scale,
                        std::span<double> g1, std::span<double> g2) {
    OXEL_CHECK_SHAPE(g1.size() == f1.v.size() && g2.size() == f2.v.size(),
                     "within_loss_grad: gradient buffer size mismatch");
    const int d = f1.depth;
    std::vector<double> ddelta(static_cast<size_t>(d));
    double value = 0.0;

    auto accumulate = [&](const PixelSampleSet::Pair& pr, bool positive, double inv_count) {
        const size_t i1 = flat(f1, pr.source);
        const size_t i2 = flat(f2, pr.target);
        const double dist = distance_impl({f1.v.data() + i1, static_cast<size_t>(d)},
                                          {f2.v.data() + i2, static_cast<size_t>(d)}, norm,
                                          ddelta);
        const double term = positive ? dist + dist * dist : -dist + dist * dist;
        value += term * inv_count;
        const double dterm = (positive ? 1.0 : -1.0) + 2.0 * dist;
        const double g = scale * inv_count * dterm;
        for (int c = 0; c < d; ++c) {
            g1[i1 + c] += g * ddelta[c];
            g2[i2 + c] -= g * ddelta[c];
        }
    };

    const double inv_p =
        samples.positives.empty() ? 0.0 : 1.0 / static_cast<double>(samples.positives.size());
    const double inv_n =
        samples.negatives.empty() ? 0.0 : 1.0 / static_cast<double>(samples.negatives.size());
    for (const auto& pr : samples.positives) accumulate(pr, true, inv_p);
    for (const auto& pr : samples.negatives) accumulate(pr, false, inv_n);
    return value;
}

double between_loss_grad(const FeatureMap& fa, const FeatureMap& fb, Norm norm, double scale,
                         std::span<double> ga, std::span<double> gb) {
    OXEL_CHECK_SHAPE(ga.size() == fa.v.size() && gb.size() == fb.v.size(),
                     "between_loss_grad: gradient buffer size mismatch");
    const size_t total = static_cast<size_t>(fa.height) * fa.width;
    if (total == 0) return 0.0;
    const double inv = 1.0 / static_cast<double>(total);
    const int d = fa.depth;
    std::vector<double> ddelta(static_cast<size_t>(d));
    double value = 0.0;
    for (int y = 0; y < fa.height; ++y)
        for (int x = 0; x < fa.width; ++x) {
            const size_t i = (static_cast<size_t>(y) * fa.width + x) * d;
            const double c = distance_impl({fa.v.data() + i, static_cast<size_t>(d)},
                                           {fb.v.data() + i, static_cast<size_t>(d)}, norm,
                                           ddelta);
            value += (-c + c * c) * inv;
            const double g = scale * inv * (-1.0 + 2.0 * c);
            for (int k = 0; k < d; ++k) {
                ga[i + k] += g * ddelta[k];
                gb[i + k] -= g * ddelta[k];
            }
        }
    return value;
}

}  // namespace oxel
