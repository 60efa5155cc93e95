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


#include "drape/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "drape/geometry.hpp"

namespace drape::binio {
namespace {

template <typename T>
std::vector<T> read_le(const std::filesystem::path& path, std::size_t expected_count) {
  static_assert(sizeof(T) == 4);
  const auto bytes = read_file(path);
  if (bytes.size() != expected_count * sizeof(T)) {
    throw IngestError(fmt::format("{}: expected {} elements ({} bytes), file has {} bytes",
                                  path.string(), expected_count, expected_count * sizeof(T),
                                  bytes.size()));
  }
  std::vector<T> out(expected_count);
  for (std::size_t i = 0; i < expected_count; ++i) {
    std::uint32_t raw = 0;
    std::memcpy(&raw, bytes.data() + 4 * i, 4);
    if constexpr (std::endian::native == std::endian::big) raw = __builtin_bswap32(raw);
    std::memcpy(&out[i], &raw, 4);
  }
  return out;
}

template <typename T>
void write_le(const std::filesystem::path& path, std::span<const T> values) {
  std::vector<std::uint8_t> bytes(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t raw = 0;
    std::memcpy(&raw, &values[i], 4);
    if constexpr (std::endian::native == std::endian::big) raw = __builtin_bswap32(raw);
    std::memcpy(bytes.data() + 4 * i, &raw, 4);
  }
  write_file(path, bytes);
}

}  // namespace

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::uint8_t> bytes(size);
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size)))
    throw IoError(fmt::format("short read on {}", path.string()));
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(fmt::format("write failed on {}", path.string()));
}

std::vector<float> read_f32(const std::filesystem::path& path, std::size_t expected_count) {
  return read_le<float>(path, expected_count);
}
std::vector<std::uint32_t> read_u32(const std::filesystem::path& path, std::size_t expected_count) {
  return read_le<std::uint32_t>(path, expected_count);
}
void write_f32(const std::filesystem::path& path, std::span<const float> values) {
  write_le<float>(path, values);
}
void write_u32(const std::filesystem::path& path, std::span<const std::uint32_t> values) {
  write_le<std::uint32_t>(path, values);
}

}  // namespace drape::binio
