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

#include <json.hpp>

#include "oxel/nn.hpp"

namespace oxel {

/// Flat named-tensor container backing the "OXCK" checkpoint format:
/// magic | u32 version | u64 count | per entry: name, dims, f32 payload.
struct Archive {
    struct Entry {
        std::string name;
        Shape shape;
        std::vector<float> data;
    };
    std::vector<Entry> entries;

    void add(std::string name, Shape shape, std::vector<float> data);
    const Entry* find(const std::string& name) const;

    void save(const std::string& path) const;
    static Archive load(const std::string& path);
};

/// Copies every parameter into the archive under prefix + name.
void registry_to_archive(const nn::ParamRegistry& reg, const std::string& prefix,
                         Archive& ar);
/// Strict restore: every parameter must be present with a matching shape.
void archive_to_registry(const Archive& ar, const std::string& prefix,
                         nn::ParamRegistry& reg);

/// FNV-1a over raw parameter bytes in registry order.
uint64_t registry_hash(const nn::ParamRegistry& reg);

/// Sidecar metadata next to a checkpoint ("<ckpt>.json").
void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

}  // namespace oxel
