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

#include "oxel/mnist.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "oxel/common.hpp"

namespace oxel {

namespace {

#include "digit_glyphs.inc"

uint32_t read_be32(std::istream& f) {
    unsigned char b[4];
    f.read(reinterpret_cast<char*>(b), 4);
    return (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) | (uint32_t(b[2]) << 8) | b[3];
}

void write_be32(std::ostream& f, uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v)};
    f.write(reinterpret_cast<const char*>(b), 4);
}

constexpr uint32_t kImageMagic = 0x00000803;
constexpr uint32_t kLabelMagic = 0x00000801;

}  // namespace

IdxPaths IdxPaths::standard(const std::string& dir) {
    return {dir + "/train-images-idx3-ubyte", dir + "/train-labels-idx1-ubyte",
            dir + "/t10k-images-idx3-ubyte", dir + "/t10k-labels-idx1-ubyte"};
}

bool idx_files_present(const std::string& dir) {
    const auto p = IdxPaths::standard(dir);
    namespace fs = std::filesystem;
    return fs::exists(p.train_images) && fs::exists(p.train_labels) &&
           fs::exists(p.test_images) && fs::exists(p.test_labels);
}

DigitDataset read_idx(const std::string& image_path, const std::string& label_path) {
    std::ifstream fi(image_path, std::ios::binary);
    if (!fi)
        throw IoError("digit dataset not found: expected IDX image file at " + image_path);
    std::ifstream fl(label_path, std::ios::binary);
    if (!fl)
        throw IoError("digit dataset not found: expected IDX label file at " + label_path);

    OXEL_CHECK(read_be32(fi) == kImageMagic, "bad IDX image magic in " + image_path);
    const uint32_t n = read_be32(fi);
    const uint32_t rows = read_be32(fi);
    const uint32_t cols = read_be32(fi);
    OXEL_CHECK(read_be32(fl) == kLabelMagic, "bad IDX label magic in " + label_path);
    const uint32_t nl = read_be32(fl);
    OXEL_CHECK(n == nl, "IDX image/label counts differ");

    DigitDataset out;
    out.rows = static_cast<int>(rows);
    out.cols = static_cast<int>(cols);
    out.images.resize(static_cast<size_t>(n) * rows * cols);
    out.labels.resize(n);
    fi.read(reinterpret_cast<char*>(out.images.data()),
            static_cast<std::streamsize>(out.images.size()));
    fl.read(reinterpret_cast<char*>(out.labels.data()),
            static_cast<std::streamsize>(out.labels.size()));
    OXEL_CHECK(fi.good() && fl.good(), "truncated IDX files");
    return out;
}

void write_idx(const std::string& image_path, const std::string& label_path,
               const DigitDataset& data) {
    std::ofstream fi(image_path, std::ios::binary);
    if (!fi) throw IoError("cannot write " + image_path);
    write_be32(fi, kImageMagic);
    write_be32(fi, static_cast<uint32_t>(data.count()));
    write_be32(fi, static_cast<uint32_t>(data.rows));
    write_be32(fi, static_cast<uint32_t>(data.cols));
    fi.write(reinterpret_cast<const char*>(data.images.data()),
             static_cast<std::streamsize>(data.images.size()));

    std::ofstream fl(label_path, std::ios::binary);
    if (!fl) throw IoError("cannot write " + label_path);
    write_be32(fl, kLabelMagic);
    write_be32(fl, static_cast<uint32_t>(data.count()));
    fl.write(reinterpret_cast<const char*>(data.labels.data()),
             static_cast<std::streamsize>(data.labels.size()));
    OXEL_CHECK(fi.good() && fl.good(), "short IDX write");
}

namespace {

/// Inverse-mapped affine sample of a glyph with bilinear filtering.
void render_digit(uint8_t* out, int digit, Rng& rng) {
    const int variant = static_cast<int>(rng.uniform_int(kGlyphVariants));
    const unsigned char* glyph = kDigitGlyphs[variant][digit];
    const double angle = rng.uniform(-0.21, 0.21);  // ~12 degrees
    const double sc = rng.uniform(0.78, 1.06);
    const double shear = rng.uniform(-0.15, 0.15);
    const double dx = rng.uniform(-2.0, 2.0);
    const double dy = rng.uniform(-2.0, 2.0);
    const double gain = rng.uniform(0.82, 1.0);
    const double c = std::cos(angle), s = std::sin(angle);
    const double cx = (kGlyphSize - 1) / 2.0;

    for (int y = 0; y < kGlyphSize; ++y) {
        for (int x = 0; x < kGlyphSize; ++x) {
            // destination -> source
            const double ux = (x - cx - dx) / sc;
            const double uy = (y - cx - dy) / sc;
            const double sx = c * ux + s * uy + shear * uy + cx;
            const double sy = -s * ux + c * uy + cx;
            double v = 0.0;
            if (sx >= 0 && sy >= 0 && sx <= kGlyphSize - 1 && sy <= kGlyphSize - 1) {
                const int x0 = static_cast<int>(sx), y0 = static_cast<int>(sy);
                const int x1 = std::min(x0 + 1, kGlyphSize - 1);
                const int y1 = std::min(y0 + 1, kGlyphSize - 1);
                const double fx = sx - x0, fy = sy - y0;
                const double top = glyph[y0 * kGlyphSize + x0] * (1 - fx) +
                                   glyph[y0 * kGlyphSize + x1] * fx;
                const double bot = glyph[y1 * kGlyphSize + x0] * (1 - fx) +
                                   glyph[y1 * kGlyphSize + x1] * fx;
                v = top * (1 - fy) + bot * fy;
            }
            out[y * kGlyphSize + x] =
                static_cast<uint8_t>(std::clamp(v * gain, 0.0, 255.0));
        }
    }
}

DigitDataset make_synthetic(size_t count, Rng& rng) {
    DigitDataset data;
    data.rows = kGlyphSize;
    data.cols = kGlyphSize;
    data.images.resize(count * kGlyphSize * kGlyphSize);
    data.labels.resize(count);
    for (size_t i = 0; i < count; ++i) {
        const int digit = static_cast<int>(rng.uniform_int(10));
        data.labels[i] = static_cast<uint8_t>(digit);
        render_digit(data.images.data() + i * kGlyphSize * kGlyphSize, digit, rng);
    }
    return data;
}

}  // namespace

void write_synthetic_digits(const std::string& dir, size_t train_count, size_t test_count,
                            uint64_t seed) {
    std::filesystem::create_directories(dir);
    Rng rng_train(derive_seed(seed, "digits-train"));
    Rng rng_test(derive_seed(seed, "digits-test"));
    const auto p = IdxPaths::standard(dir);
    write_idx(p.train_images, p.train_labels, make_synthetic(train_count, rng_train));
    write_idx(p.test_images, p.test_labels, make_synthetic(test_count, rng_test));
}

}  // namespace oxel
