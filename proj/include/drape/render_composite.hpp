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
#include <limits>
#include <span>
#include <vector>

#include "drape/geometry.hpp"
#include "drape/scene_setup.hpp"

namespace drape {

struct DepthMap {
  int width = 0, height = 0;
  std::vector<float> depth;  // row-major, +inf where nothing was drawn

  DepthMap() = default;
  DepthMap(int w, int h) : width(w), height(h), depth(static_cast<std::size_t>(w) * h, kFar) {}
  float at(int x, int y) const { return depth[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return depth[static_cast<std::size_t>(y) * width + x]; }

  static constexpr float kFar = std::numeric_limits<float>::infinity();
};

/// 8-bit sRGB, row-major, interleaved RGB.
struct FrameImage {
  int width = 0, height = 0;
  std::vector<std::uint8_t> rgb;

  FrameImage() = default;
  FrameImage(int w, int h, std::uint8_t fill = 0) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, fill) {}
  std::uint8_t* pixel(int x, int y) { return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
  const std::uint8_t* pixel(int x, int y) const { return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
  bool operator==(const FrameImage&) const = default;
};

struct BlanketMaterial {
  Vec3 albedo = Vec3::Constant(0.5);  // linear RGB in [0,1]
  bool two_sided = true;
};

/// Each channel uniform on [0,1), reproducible for a given (seed, video index).
BlanketMaterial sample_blanket_color(std::uint64_t seed, std::uint64_t video_index);

inline constexpr double kNearClip = 1e-4;

/// Visits every pixel whose center is covered by the triangle, with the
/// perspective-correct camera depth. Pixel (x, y) is centered at image
/// coordinate (x, y), origin at the top-left pixel; shared edges follow the
/// top-left fill rule so each pixel is drawn once per mesh.
/// Triangles are clipped against z = kNearClip in camera space.
template <typename Fn>
void rasterize_triangle(const CameraModel& camera, const Vec3& a, const Vec3& b, const Vec3& c, Fn&& fragment);

DepthMap rasterize_depth(std::span<const TriangleMesh> meshes, const CameraModel& camera);

struct RenderOptions {
  double ambient_floor = 0.15;
  /// 2×2 ordered supersampling; the holdout map must then be twice the size.
  bool supersample = false;
  /// A blanket fragment survives when its depth is below holdout + this (m).
  /// Coarse cloth facets dip slightly into the body they rest on.
  double holdout_bias = 0.0;
};

/// Draws the blanket over `original`. A fragment is kept when it is the
/// nearest blanket fragment and strictly in front of the holdout depth;
/// every other pixel is left byte-identical.
FrameImage render_blanket(const TriangleMesh& blanket, const BlanketMaterial& material, const DirectionalLight& light,
                          const CameraModel& camera, const DepthMap& holdout, const FrameImage& original,
                          const RenderOptions& options = {});

/// Camera whose image has `factor` times the resolution, with sample
/// centers at the matching sub-pixel positions.
CameraModel scaled_camera(const CameraModel& camera, int factor);

/// Quad-grid cloth surface for rendering.
struct QuadGrid {
  int res = 0;
  Points positions;  // res × res, index j·res + i

  TriangleMesh triangulate() const;
};

/// Catmull–Clark style refinement of an open quad grid; each level maps
/// res → 2·res − 1.
QuadGrid subdivide_for_render(const QuadGrid& grid, int levels = 1);

double linear_to_srgb(double c);
std::uint8_t encode_srgb8(double linear);

}  // namespace drape

#include "drape/rasterize_inl.hpp"
