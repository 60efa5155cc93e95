// Copyright 2026 The Drape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "drape/render_composite.hpp"

namespace drape {

enum class ImageEncoder { Png, Jpeg };

ImageEncoder parse_encoder(std::string_view name);
std::string_view extension(ImageEncoder encoder);

std::vector<std::uint8_t> encode_png(const FrameImage& image);
std::vector<std::uint8_t> encode_jpeg(const FrameImage& image, int quality = 90);

/// Decodes PNG (8-bit RGB/RGBA/gray) or JPEG by signature.
FrameImage decode_image(const std::vector<std::uint8_t>& bytes);

FrameImage read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const FrameImage& image, ImageEncoder encoder);

}  // namespace drape
