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

#include "oxel/image.hpp"
#include "oxel/mnist.hpp"
#include "oxel/rng.hpp"

namespace oxel {

/// One recolored digit: 32x32 RGB, binary noisy label, the pre-noise label,
/// and which of the two background colors was applied.
struct ColoredSample {
    Image image;
    uint8_t label = 0;        // noisy binary label
    uint8_t clean_label = 0;  // binarized digit before flipping
    uint8_t color_id = 0;     // 0 = red background, 1 = green background
};

struct ColoredMnistConfig {
    double flip_prob = 0.25;
    double p_train = 0.85;  // P(color id == noisy label) in-distribution
    double p_test = 0.10;   // reversed correlation, out-of-distribution
    double background_threshold = 0.1;
    int out_size = 32;
    size_t train_count = 20000;  // drawn from the source train split
    size_t eval_count = 5000;    // per evaluation domain
    double val_fraction = 0.1;

    void validate() const;
    uint64_t content_hash(uint64_t seed) const;
};

/// 0 for digits below five, 1 otherwise.
int binarize_label(int digit);

/// Applies label noise and correlated background color to a set of digits.
std::vector<ColoredSample> build_domain(const DigitDataset& digits,
                                        const std::vector<size_t>& indices, Rng& rng,
                                        double p_color, double flip_prob,
                                        double background_threshold = 0.1, int out_size = 32);

/// All splits used by training and evaluation. train/val share the ID
/// correlation; ood uses the reversed one.
struct ColoredMnistData {
    std::vector<ColoredSample> train;  // ID correlation
    std::vector<ColoredSample> val;    // ID correlation, held out
    std::vector<ColoredSample> id_test;
    std::vector<ColoredSample> ood_test;
};

ColoredMnistData build_colored_mnist(const DigitDataset& train_digits,
                                     const DigitDataset& test_digits,
                                     const ColoredMnistConfig& cfg, uint64_t seed);

/// Binary archive with an embedded config hash; load returns false when the
/// file is absent or was generated under a different config/seed.
void save_archive(const std::string& path, const ColoredMnistData& data, uint64_t hash);
bool load_archive(const std::string& path, ColoredMnistData& data, uint64_t expected_hash);

}  // namespace oxel
