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

#include <cstdint>
#include <string>
#include <vector>

#include "oxel/rng.hpp"

namespace oxel {

/// 28x28 grayscale digit set in the canonical IDX layout.
struct DigitDataset {
    int rows = 28, cols = 28;
    std::vector<uint8_t> images;  // n * rows * cols
    std::vector<uint8_t> labels;  // n

    size_t count() const { return labels.size(); }
    const uint8_t* image(size_t i) const {
        return images.data() + i * static_cast<size_t>(rows) * cols;
    }
};

/// Standard IDX file names under a dataset directory.
struct IdxPaths {
    std::string train_images, train_labels, test_images, test_labels;
    static IdxPaths standard(const std::string& dir);
};

DigitDataset read_idx(const std::string& image_path, const std::string& label_path);
void write_idx(const std::string& image_path, const std::string& label_path,
               const DigitDataset& data);

/// True when all four standard IDX files exist under dir.
bool idx_files_present(const std::string& dir);

/// Renders a synthetic digit corpus (embedded glyphs + random affine jitter)
/// and writes the four standard IDX files. Substitutes for the real corpus
/// when it is not available locally.
void write_synthetic_digits(const std::string& dir, size_t train_count = 60000,
                            size_t test_count = 10000, uint64_t seed = 7);

}  // namespace oxel
