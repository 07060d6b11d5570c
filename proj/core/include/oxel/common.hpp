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
#include <stdexcept>
#include <string>

namespace oxel {

/// Base error for all failures raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid user-supplied configuration (ranges, schemas, dimensions).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Shape/dimension mismatch in numeric code.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

/// I/O failure (missing files, corrupt archives).
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

#define OXEL_CHECK(cond, msg)                      \
    do {                                           \
        if (!(cond)) throw ::oxel::Error(msg);     \
    } while (0)

#define OXEL_CHECK_CONFIG(cond, msg)               \
    do {                                           \
        if (!(cond)) throw ::oxel::ConfigError(msg); \
    } while (0)

#define OXEL_CHECK_SHAPE(cond, msg)                \
    do {                                           \
        if (!(cond)) throw ::oxel::ShapeError(msg); \
    } while (0)

/// Integer pixel coordinate, x = column, y = row.
struct Pixel {
    int x = 0;
    int y = 0;
    bool operator==(const Pixel&) const = default;
};

inline const char* version_string() { return "oxel 0.1.0"; }

}  // namespace oxel
