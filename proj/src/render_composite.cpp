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


#include "drape/render_composite.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

namespace drape {

BlanketMaterial sample_blanket_color(std::uint64_t seed, std::uint64_t video_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(video_index), static_cast<std::uint32_t>(video_index >> 32)};
  std::mt19937_64 rng(seq);
  // 53-bit mantissa draw; std::uniform_real_distribution is not portable
  // across standard libraries.
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  BlanketMaterial m;
  for (int c = 0; c < 3; ++c) m.albedo[c] = uniform();
  return m;
}

DepthMap rasterize_depth(std::span<const TriangleMesh> meshes, const CameraModel& camera) {
  DepthMap map(camera.width, camera.height);
  for (const auto& mesh : meshes) {
    for (const auto& f : mesh.faces) {
      rasterize_triangle(camera, mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]],
                         [&](int x, int y, double depth) {
                           float& d = map.at(x, y);
                           const auto z = static_cast<float>(depth);
                           if (z < d) d = z;
                         });
    }
  }
  return map;
}

CameraModel scaled_camera(const CameraModel& camera, int factor) {
  CameraModel out = camera;
  out.fx *= factor;
  out.fy *= factor;
  out.cx = factor * camera.cx + 0.5 * (factor - 1);
  out.cy = factor * camera.cy + 0.5 * (factor - 1);
  out.width *= factor;
  out.height *= factor;
  return out;
}

double linear_to_srgb(double c) {
  c = std::clamp(c, 0.0, 1.0);
  return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

namespace {

double srgb_to_linear(double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); }

}  // namespace

std::uint8_t encode_srgb8(double linear) {
  return static_cast<std::uint8_t>(std::lround(linear_to_srgb(linear) * 255.0));
}

FrameImage render_blanket(const TriangleMesh& blanket, const BlanketMaterial& material, const DirectionalLight& light,
                          const CameraModel& camera, const DepthMap& holdout, const FrameImage& original,
                          const RenderOptions& options) {
  const int factor = options.supersample ? 2 : 1;
  if (original.width != camera.width || original.height != camera.height)
    throw InvalidInput(fmt::format("frame is {}x{}, camera expects {}x{}", original.width, original.height,
                                   camera.width, camera.height));
  if (holdout.width != camera.width * factor || holdout.height != camera.height * factor)
    throw InvalidInput(fmt::format("holdout map is {}x{}, expected {}x{}", holdout.width, holdout.height,
                                   camera.width * factor, camera.height * factor));

  const CameraModel sample_cam = factor == 1 ? camera : scaled_camera(camera, factor);
  const std::size_t samples = static_cast<std::size_t>(sample_cam.width) * sample_cam.height;
  std::vector<double> depth(samples, std::numeric_limits<double>::infinity());
  std::vector<Vec3> color(samples, Vec3::Zero());

  const Vec3 eye = camera.center();
  const Vec3 to_light = -light.direction.normalized();
  for (const auto& f : blanket.faces) {
    const Vec3& a = blanket.vertices[f[0]];
    const Vec3& b = blanket.vertices[f[1]];
    const Vec3& c = blanket.vertices[f[2]];
    Vec3 n = (b - a).cross(c - a);
    if (!(n.norm() > 0)) continue;
    n.normalize();
    if (n.dot(eye - a) < 0) {
      if (!material.two_sided) continue;
      n = -n;
    }
    const double lambert = std::max(0.0, n.dot(to_light)) * light.intensity;
    const double shade = std::min(1.0, std::max(options.ambient_floor, lambert));
    const Vec3 rgb = material.albedo * shade;
    rasterize_triangle(sample_cam, a, b, c, [&](int x, int y, double z) {
      const std::size_t i = static_cast<std::size_t>(y) * sample_cam.width + x;
      if (z < depth[i]) {
        depth[i] = z;
        color[i] = rgb;
      }
    });
  }

  FrameImage out = original;
  for (int y = 0; y < camera.height; ++y) {
    for (int x = 0; x < camera.width; ++x) {
      Vec3 sum = Vec3::Zero();
      int visible = 0;
      for (int sy = 0; sy < factor; ++sy) {
        for (int sx = 0; sx < factor; ++sx) {
          const int X = x * factor + sx, Y = y * factor + sy;
          const std::size_t i = static_cast<std::size_t>(Y) * sample_cam.width + X;
          if (depth[i] < static_cast<double>(holdout.at(X, Y)) + options.holdout_bias) {
            sum += color[i];
            ++visible;
          }
        }
      }
      if (visible == 0) continue;
      std::uint8_t* px = out.pixel(x, y);
      if (visible == factor * factor) {
        const Vec3 c = sum / visible;
        for (int k = 0; k < 3; ++k) px[k] = encode_srgb8(c[k]);
      } else {
        // Partial coverage: alpha-over in linear space.
        const double alpha = static_cast<double>(visible) / (factor * factor);
        const Vec3 c = sum / visible;
        for (int k = 0; k < 3; ++k) {
          const double bg = srgb_to_linear(px[k] / 255.0);
          px[k] = encode_srgb8(alpha * c[k] + (1.0 - alpha) * bg);
        }
      }
    }
  }
  return out;
}

TriangleMesh QuadGrid::triangulate() const { return {positions, grid_faces(res)}; }

namespace {

QuadGrid subdivide_once(const QuadGrid& g) {
  const int n = g.res;
  const int m = 2 * n - 1;
  auto P = [&](int i, int j) -> const Vec3& { return g.positions[static_cast<std::size_t>(j * n + i)]; };
  auto face = [&](int i, int j) -> Vec3 { return 0.25 * (P(i, j) + P(i + 1, j) + P(i, j + 1) + P(i + 1, j + 1)); };

  QuadGrid out;
  out.res = m;
  out.positions.resize(static_cast<std::size_t>(m) * m);
  auto Q = [&](int I, int J) -> Vec3& { return out.positions[static_cast<std::size_t>(J * m + I)]; };

  for (int J = 0; J < m; ++J) {
    for (int I = 0; I < m; ++I) {
      const bool odd_i = I % 2 == 1, odd_j = J % 2 == 1;
      if (odd_i && odd_j) {
        Q(I, J) = face(I / 2, J / 2);
      } else if (odd_i) {
        const int i = I / 2, j = J / 2;
        const Vec3 mid = 0.5 * (P(i, j) + P(i + 1, j));
        Q(I, J) = (j == 0 || j == n - 1) ? mid : Vec3(0.5 * mid + 0.25 * (face(i, j - 1) + face(i, j)));
      } else if (odd_j) {
        const int i = I / 2, j = J / 2;
        const Vec3 mid = 0.5 * (P(i, j) + P(i, j + 1));
        Q(I, J) = (i == 0 || i == n - 1) ? mid : Vec3(0.5 * mid + 0.25 * (face(i - 1, j) + face(i, j)));
      } else {
        const int i = I / 2, j = J / 2;
        const bool bi = i == 0 || i == n - 1, bj = j == 0 || j == n - 1;
        if (bi && bj) {
          Q(I, J) = P(i, j);
        } else if (bj) {
          Q(I, J) = (P(i - 1, j) + 6.0 * P(i, j) + P(i + 1, j)) / 8.0;
        } else if (bi) {
          Q(I, J) = (P(i, j - 1) + 6.0 * P(i, j) + P(i, j + 1)) / 8.0;
        } else {
          const Vec3 F = 0.25 * (face(i - 1, j - 1) + face(i, j - 1) + face(i - 1, j) + face(i, j));
          const Vec3 R = 0.125 * (4.0 * P(i, j) + P(i - 1, j) + P(i + 1, j) + P(i, j - 1) + P(i, j + 1));
          // Valence-4 Catmull–Clark vertex rule (F + 2R + P) / 4 with R the
          // mean of the four edge midpoints.
          Q(I, J) = 0.25 * (F + 2.0 * R + P(i, j));
        }
      }
    }
  }
  return out;
}

}  // namespace

QuadGrid subdivide_for_render(const QuadGrid& grid, int levels) {
  if (levels < 0) throw InvalidInput("subdivision levels must be >= 0");
  if (grid.res < 2 || grid.positions.size() != static_cast<std::size_t>(grid.res) * grid.res)
    throw InvalidInput("subdivide_for_render expects a res × res quad grid with res >= 2");
  QuadGrid g = grid;
  for (int l = 0; l < levels; ++l) g = subdivide_once(g);
  return g;
}

}  // namespace drape
