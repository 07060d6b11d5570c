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

#include "oxel/image.hpp"

namespace oxel {

/// Writes an 8-bit PNG (1 or 3 channels). Values are clipped to [0,1] and
/// quantized with round-to-nearest.
void write_png(const std::string& path, const Image& img);

/// Reads an 8-bit PNG into a float image in [0,1]. Supports gray, gray+alpha,
/// RGB and RGBA color types (alpha is dropped).
Image read_png(const std::string& path);

}  // namespace oxel
