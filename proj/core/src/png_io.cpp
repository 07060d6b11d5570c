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

#include "oxel/png_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace oxel {

namespace {

void put_u32(std::string& s, uint32_t v) {
    s.push_back(static_cast<char>(v >> 24));
    s.push_back(static_cast<char>(v >> 16));
    s.push_back(static_cast<char>(v >> 8));
    s.push_back(static_cast<char>(v));
}

uint32_t get_u32(const unsigned char* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | p[3];
}

void append_chunk(std::string& out, const char type[4], const std::string& payload) {
    put_u32(out, static_cast<uint32_t>(payload.size()));
    std::string body(type, 4);
    body += payload;
    out += body;
    const auto crc = crc32(0, reinterpret_cast<const Bytef*>(body.data()),
                           static_cast<uInt>(body.size()));
    put_u32(out, static_cast<uint32_t>(crc));
}

std::string zlib_compress(const std::string& in) {
    uLongf bound = compressBound(static_cast<uLong>(in.size()));
    std::string out(bound, '\0');
    const int rc = compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                             reinterpret_cast<const Bytef*>(in.data()),
                             static_cast<uLong>(in.size()), 6);
    OXEL_CHECK(rc == Z_OK, "png: zlib compression failed");
    out.resize(bound);
    return out;
}

std::string zlib_decompress(const std::string& in, size_t expected) {
    std::string out(expected, '\0');
    uLongf len = static_cast<uLongf>(expected);
    const int rc = uncompress(reinterpret_cast<Bytef*>(out.data()), &len,
                              reinterpret_cast<const Bytef*>(in.data()),
                              static_cast<uLong>(in.size()));
    if (rc != Z_OK || len != expected) throw IoError("png: corrupt compressed stream");
    return out;
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

}  // namespace

void write_png(const std::string& path, const Image& img) {
    OXEL_CHECK(img.channels() == 1 || img.channels() == 3,
               "write_png: only 1- or 3-channel images");
    const int h = img.height(), w = img.width(), ch = img.channels();
    std::string raw;
    raw.reserve(static_cast<size_t>(h) * (1 + static_cast<size_t>(w) * ch));
    for (int y = 0; y < h; ++y) {
        raw.push_back('\0');  // filter: none
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < ch; ++c) {
                const float v = std::clamp(img.at(y, x, c), 0.f, 1.f);
                raw.push_back(static_cast<char>(std::lround(v * 255.0f)));
            }
        }
    }
    std::string out("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    put_u32(ihdr, static_cast<uint32_t>(w));
    put_u32(ihdr, static_cast<uint32_t>(h));
    ihdr.push_back(8);                       // bit depth
    ihdr.push_back(ch == 3 ? 2 : 0);         // color type
    ihdr.push_back(0);                       // compression
    ihdr.push_back(0);                       // filter
    ihdr.push_back(0);                       // interlace
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", zlib_compress(raw));
    append_chunk(out, "IEND", "");

    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("write_png: cannot open " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    OXEL_CHECK(f.good(), "write_png: short write to " + path);
}

Image read_png(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("read_png: cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (buf.size() < 8 || std::memcmp(buf.data(), "\x89PNG\r\n\x1a\n", 8) != 0)
        throw IoError("read_png: not a PNG file: " + path);

    size_t pos = 8;
    uint32_t w = 0, h = 0;
    int color_type = -1, bit_depth = 0;
    std::string idat;
    while (pos + 8 <= buf.size()) {
        const auto* p = reinterpret_cast<const unsigned char*>(buf.data() + pos);
        const uint32_t len = get_u32(p);
        const std::string type(buf.data() + pos + 4, 4);
        if (pos + 12 + len > buf.size()) throw IoError("read_png: truncated chunk");
        const char* payload = buf.data() + pos + 8;
        if (type == "IHDR") {
            const auto* q = reinterpret_cast<const unsigned char*>(payload);
            w = get_u32(q);
            h = get_u32(q + 4);
            bit_depth = q[8];
            color_type = q[9];
            if (q[12] != 0) throw IoError("read_png: interlaced PNGs unsupported");
        } else if (type == "IDAT") {
            idat.append(payload, len);
        } else if (type == "IEND") {
            break;
        }
        pos += 12 + len;
    }
    OXEL_CHECK(bit_depth == 8, "read_png: only 8-bit PNGs supported");
    int nch;
    switch (color_type) {
        case 0: nch = 1; break;
        case 2: nch = 3; break;
        case 4: nch = 2; break;
        case 6: nch = 4; break;
        default: throw IoError("read_png: unsupported color type");
    }
    const size_t stride = static_cast<size_t>(w) * nch;
    std::string raw = zlib_decompress(idat, (stride + 1) * h);

    std::vector<unsigned char> prev(stride, 0), cur(stride, 0);
    const int out_ch = (nch >= 3) ? 3 : 1;
    Image img(static_cast<int>(h), static_cast<int>(w), out_ch);
    for (uint32_t y = 0; y < h; ++y) {
        const auto* row = reinterpret_cast<const unsigned char*>(raw.data() + y * (stride + 1));
        const int filter = row[0];
        for (size_t i = 0; i < stride; ++i) {
            const int x = row[1 + i];
            const int a = i >= static_cast<size_t>(nch) ? cur[i - nch] : 0;
            const int b = prev[i];
            const int c = i >= static_cast<size_t>(nch) ? prev[i - nch] : 0;
            int v;
            switch (filter) {
                case 0: v = x; break;
                case 1: v = x + a; break;
                case 2: v = x + b; break;
                case 3: v = x + (a + b) / 2; break;
                case 4: v = x + paeth(a, b, c); break;
                default: throw IoError("read_png: bad filter byte");
            }
            cur[i] = static_cast<unsigned char>(v & 0xff);
        }
        for (uint32_t x = 0; x < w; ++x)
            for (int c = 0; c < out_ch; ++c)
                img.at(static_cast<int>(y), static_cast<int>(x), c) =
                    cur[x * nch + c] / 255.f;
        std::swap(prev, cur);
    }
    return img;
}

}  // namespace oxel
