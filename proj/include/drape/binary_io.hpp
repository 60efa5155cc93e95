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
#include <span>
#include <vector>

namespace drape::binio {

// Raw little-endian arrays. The element count is checked against the file
// size; a mismatch throws IngestError naming the path.
std::vector<float> read_f32(const std::filesystem::path& path, std::size_t expected_count);
std::vector<std::uint32_t> read_u32(const std::filesystem::path& path, std::size_t expected_count);

void write_f32(const std::filesystem::path& path, std::span<const float> values);
void write_u32(const std::filesystem::path& path, std::span<const std::uint32_t> values);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace drape::binio
