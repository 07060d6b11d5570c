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

#include "oxel/coloredmnist.hpp"

#include <cstring>
#include <fstream>
#include <numeric>

#include "oxel/common.hpp"

namespace oxel {

namespace {

constexpr float kRed[3] = {1.f, 0.f, 0.f};
constexpr float kGreen[3] = {0.f, 1.f, 0.f};

uint64_t mix(uint64_t h, uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

}  // namespace

void ColoredMnistConfig::validate() const {
    OXEL_CHECK_CONFIG(flip_prob >= 0 && flip_prob <= 1, "colored digits: flip_prob in [0,1]");
    OXEL_CHECK_CONFIG(p_train >= 0 && p_train <= 1, "colored digits: p_train in [0,1]");
    OXEL_CHECK_CONFIG(p_test >= 0 && p_test <= 1, "colored digits: p_test in [0,1]");
    OXEL_CHECK_CONFIG(background_threshold > 0 && background_threshold < 1,
                      "colored digits: background threshold in (0,1)");
    OXEL_CHECK_CONFIG(out_size >= 4, "colored digits: output size too small");
    OXEL_CHECK_CONFIG(val_fraction > 0 && val_fraction < 1,
                      "colored digits: val fraction in (0,1)");
}

uint64_t ColoredMnistConfig::content_hash(uint64_t seed) const {
    uint64_t h = 0x4f58434dULL;  // "OXCM"
    auto mixd = [&h](double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, 8);
        h = mix(h, bits);
    };
    mixd(flip_prob);
    mixd(p_train);
    mixd(p_test);
    mixd(background_threshold);
    h = mix(h, static_cast<uint64_t>(out_size));
    h = mix(h, train_count);
    h = mix(h, eval_count);
    mixd(val_fraction);
    h = mix(h, seed);
    return h;
}

int binarize_label(int digit) {
    OXEL_CHECK(digit >= 0 && digit <= 9, "binarize_label: digit out of range");
    return digit < 5 ? 0 : 1;
}

std::vector<ColoredSample> build_domain(const DigitDataset& digits,
                                        const std::vector<size_t>& indices, Rng& rng,
                                        double p_color, double flip_prob,
                                        double background_threshold, int out_size) {
    OXEL_CHECK_CONFIG(p_color >= 0 && p_color <= 1 && flip_prob >= 0 && flip_prob <= 1,
                      "build_domain: probabilities must be in [0, 1]");
    std::vector<ColoredSample> out;
    out.reserve(indices.size());
    for (size_t idx : indices) {
        OXEL_CHECK(idx < digits.count(), "build_domain: index out of range");
        ColoredSample s;
        s.clean_label = static_cast<uint8_t>(binarize_label(digits.labels[idx]));
        const bool flip = rng.bernoulli(flip_prob);
        s.label = flip ? static_cast<uint8_t>(1 - s.clean_label) : s.clean_label;
        s.color_id = rng.bernoulli(p_color) ? s.label : static_cast<uint8_t>(1 - s.label);

        Image gray(digits.rows, digits.cols, 1);
        const uint8_t* src = digits.image(idx);
        for (int i = 0; i < digits.rows * digits.cols; ++i)
            gray.values()[static_cast<size_t>(i)] = src[i] / 255.f;
        Image resized = resize_bilinear(gray, out_size, out_size);

        s.image = Image(out_size, out_size, 3);
        const float* bg = s.color_id == 0 ? kRed : kGreen;
        for (int y = 0; y < out_size; ++y)
            for (int x = 0; x < out_size; ++x) {
                const float g = resized.at(y, x, 0);
                if (g < background_threshold) {
                    for (int c = 0; c < 3; ++c) s.image.at(y, x, c) = bg[c];
                } else {
                    for (int c = 0; c < 3; ++c) s.image.at(y, x, c) = g;
                }
            }
        out.push_back(std::move(s));
    }
    return out;
}

ColoredMnistData build_colored_mnist(const DigitDataset& train_digits,
                                     const DigitDataset& test_digits,
                                     const ColoredMnistConfig& cfg, uint64_t seed) {
    cfg.validate();
    OXEL_CHECK(train_digits.count() > 0 && test_digits.count() > 0,
               "build_colored_mnist: empty source digits");

    // deterministic validation carve-out, then subsampling to the configured counts
    Rng split_rng(derive_seed(seed, "split"));
    std::vector<size_t> order(train_digits.count());
    std::iota(order.begin(), order.end(), size_t{0});
    for (size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[static_cast<size_t>(split_rng.uniform_int(
                                    static_cast<int64_t>(i)))]);
    const size_t val_n = std::max<size_t>(1, static_cast<size_t>(
                                                 cfg.val_fraction * order.size()));
    std::vector<size_t> val_idx(order.begin(), order.begin() + val_n);
    std::vector<size_t> train_idx(order.begin() + val_n, order.end());
    if (train_idx.size() > cfg.train_count) train_idx.resize(cfg.train_count);
    if (val_idx.size() > cfg.eval_count) val_idx.resize(cfg.eval_count);

    std::vector<size_t> test_idx(test_digits.count());
    std::iota(test_idx.begin(), test_idx.end(), size_t{0});
    if (test_idx.size() > cfg.eval_count) test_idx.resize(cfg.eval_count);

    ColoredMnistData data;
    Rng rng_train(derive_seed(seed, "domain-train"));
    Rng rng_val(derive_seed(seed, "domain-val"));
    Rng rng_id(derive_seed(seed, "domain-id"));
    Rng rng_ood(derive_seed(seed, "domain-ood"));
    data.train = build_domain(train_digits, train_idx, rng_train, cfg.p_train, cfg.flip_prob,
                              cfg.background_threshold, cfg.out_size);
    data.val = build_domain(train_digits, val_idx, rng_val, cfg.p_train, cfg.flip_prob,
                            cfg.background_threshold, cfg.out_size);
    data.id_test = build_domain(test_digits, test_idx, rng_id, cfg.p_train, cfg.flip_prob,
                                cfg.background_threshold, cfg.out_size);
    data.ood_test = build_domain(test_digits, test_idx, rng_ood, cfg.p_test, cfg.flip_prob,
                                 cfg.background_threshold, cfg.out_size);
    return data;
}

namespace {

void write_split(std::ofstream& f, const std::vector<ColoredSample>& split) {
    const uint64_t n = split.size();
    f.write(reinterpret_cast<const char*>(&n), 8);
    if (split.empty()) return;
    const uint32_t size = static_cast<uint32_t>(split[0].image.height());
    f.write(reinterpret_cast<const char*>(&size), 4);
    std::vector<uint8_t> buf;
    for (const auto& s : split) {
        buf.assign(s.image.size(), 0);
        for (size_t i = 0; i < buf.size(); ++i)
            buf[i] = static_cast<uint8_t>(std::lround(s.image.values()[i] * 255.f));
        f.write(reinterpret_cast<const char*>(buf.data()),
                static_cast<std::streamsize>(buf.size()));
        f.put(static_cast<char>(s.label));
        f.put(static_cast<char>(s.clean_label));
        f.put(static_cast<char>(s.color_id));
    }
}

bool read_split(std::ifstream& f, std::vector<ColoredSample>& split) {
    uint64_t n = 0;
    f.read(reinterpret_cast<char*>(&n), 8);
    if (!f) return false;
    split.clear();
    split.reserve(n);
    if (n == 0) return true;
    uint32_t size = 0;
    f.read(reinterpret_cast<char*>(&size), 4);
    if (!f || size == 0 || size > 4096) return false;
    std::vector<uint8_t> buf(static_cast<size_t>(size) * size * 3);
    for (uint64_t i = 0; i < n; ++i) {
        f.read(reinterpret_cast<char*>(buf.data()),
               static_cast<std::streamsize>(buf.size()));
        ColoredSample s;
        s.image = Image(static_cast<int>(size), static_cast<int>(size), 3);
        for (size_t j = 0; j < buf.size(); ++j) s.image.values()[j] = buf[j] / 255.f;
        s.label = static_cast<uint8_t>(f.get());
        s.clean_label = static_cast<uint8_t>(f.get());
        s.color_id = static_cast<uint8_t>(f.get());
        if (!f) return false;
        split.push_back(std::move(s));
    }
    return true;
}

constexpr char kArchiveMagic[4] = {'O', 'X', 'C', 'M'};

}  // namespace

void save_archive(const std::string& path, const ColoredMnistData& data, uint64_t hash) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("save_archive: cannot open " + path);
    f.write(kArchiveMagic, 4);
    f.write(reinterpret_cast<const char*>(&hash), 8);
    write_split(f, data.train);
    write_split(f, data.val);
    write_split(f, data.id_test);
    write_split(f, data.ood_test);
    OXEL_CHECK(f.good(), "save_archive: short write");
}

bool load_archive(const std::string& path, ColoredMnistData& data, uint64_t expected_hash) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return false;
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kArchiveMagic, 4) != 0) return false;
    uint64_t hash = 0;
    f.read(reinterpret_cast<char*>(&hash), 8);
    if (!f || hash != expected_hash) return false;
    return read_split(f, data.train) && read_split(f, data.val) &&
           read_split(f, data.id_test) && read_split(f, data.ood_test);
}

}  // namespace oxel
