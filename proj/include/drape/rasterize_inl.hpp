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

#include <algorithm>
#include <array>
#include <cmath>

namespace drape {
namespace detail {

struct ScreenVertex {
  double x, y;   // pixels
  double inv_z;  // 1 / camera depth
};

// Edge function test with the top-left rule for y-down screens and either
// winding.
inline bool is_top_left(const ScreenVertex& a, const ScreenVertex& b, bool ccw) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  if (ccw) return (dy == 0 && dx < 0) || dy > 0;
  return (dy == 0 && dx > 0) || dy < 0;
}

template <typename Fn>
void raster_screen_triangle(int width, int height, const ScreenVertex& v0, const ScreenVertex& v1,
                            const ScreenVertex& v2, Fn& fragment) {
  const double area = (v1.x - v0.x) * (v2.y - v0.y) - (v1.y - v0.y) * (v2.x - v0.x);
  if (area == 0 || !std::isfinite(area)) return;
  const bool ccw = area < 0;
  const double inv_area = 1.0 / area;

  const double min_x = std::min({v0.x, v1.x, v2.x}), max_x = std::max({v0.x, v1.x, v2.x});
  const double min_y = std::min({v0.y, v1.y, v2.y}), max_y = std::max({v0.y, v1.y, v2.y});
  const int x0 = static_cast<int>(std::max(0.0, std::ceil(min_x)));
  const int x1 = static_cast<int>(std::min(width - 1.0, std::floor(max_x)));
  const int y0 = static_cast<int>(std::max(0.0, std::ceil(min_y)));
  const int y1 = static_cast<int>(std::min(height - 1.0, std::floor(max_y)));
  if (x0 > x1 || y0 > y1) return;

  const bool tl0 = is_top_left(v1, v2, ccw), tl1 = is_top_left(v2, v0, ccw), tl2 = is_top_left(v0, v1, ccw);
  auto edge = [](const ScreenVertex& a, const ScreenVertex& b, double px, double py) {
    return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
  };
  auto inside = [&](double w, bool tl) { return ccw ? (w < 0 || (w == 0 && tl)) : (w > 0 || (w == 0 && tl)); };

  for (int y = y0; y <= y1; ++y) {
    const double py = y;
    for (int x = x0; x <= x1; ++x) {
      const double px = x;
      const double w0 = edge(v1, v2, px, py), w1 = edge(v2, v0, px, py), w2 = edge(v0, v1, px, py);
      if (!inside(w0, tl0) || !inside(w1, tl1) || !inside(w2, tl2)) continue;
      const double b0 = w0 * inv_area, b1 = w1 * inv_area, b2 = w2 * inv_area;
      const double inv_z = b0 * v0.inv_z + b1 * v1.inv_z + b2 * v2.inv_z;
      if (!(inv_z > 0)) continue;
      fragment(x, y, 1.0 / inv_z);
    }
  }
}

}  // namespace detail

template <typename Fn>
void rasterize_triangle(const CameraModel& camera, const Vec3& a, const Vec3& b, const Vec3& c, Fn&& fragment) {
  // Sutherland–Hodgman against z ≥ kNearClip in camera space.
  std::array<Vec3, 4> poly;
  int count = 0;
  const std::array<Vec3, 3> in = {camera.to_camera(a), camera.to_camera(b), camera.to_camera(c)};
  for (int k = 0; k < 3; ++k) {
    const Vec3& p = in[k];
    const Vec3& q = in[(k + 1) % 3];
    const bool p_in = p.z() >= kNearClip, q_in = q.z() >= kNearClip;
    if (p_in) poly[count++] = p;
    if (p_in != q_in) {
      const double t = (kNearClip - p.z()) / (q.z() - p.z());
      Vec3 r = p + t * (q - p);
      r.z() = kNearClip;
      poly[count++] = r;
    }
  }
  if (count < 3) return;
  std::array<detail::ScreenVertex, 4> s;
  for (int k = 0; k < count; ++k) {
    const Vec3& p = poly[k];
    s[k] = {camera.fx * p.x() / p.z() + camera.cx, camera.fy * p.y() / p.z() + camera.cy, 1.0 / p.z()};
  }
  for (int k = 1; k + 1 < count; ++k)
    detail::raster_screen_triangle(camera.width, camera.height, s[0], s[k], s[k + 1], fragment);
}

}  // namespace drape
