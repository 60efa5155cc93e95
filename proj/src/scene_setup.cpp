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


#include "drape/scene_setup.hpp"

#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace drape {

void CameraModel::validate() const {
  if (!(fx > 0 && fy > 0)) throw InvalidInput(fmt::format("focal lengths must be positive ({}, {})", fx, fy));
  if (width <= 0 || height <= 0) throw InvalidInput(fmt::format("bad image size {}x{}", width, height));
  if (!(cx > 0 && cx < width && cy > 0 && cy < height))
    throw InvalidInput(fmt::format("principal point ({}, {}) outside the {}x{} image", cx, cy, width, height));
  if (!rotation.allFinite() || !translation.allFinite()) throw InvalidInput("non-finite camera extrinsics");
  const double orth = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (orth > 1e-6 || std::abs(rotation.determinant() - 1.0) > 1e-6)
    throw InvalidInput("camera rotation is not a proper rotation");
}

std::optional<Projection> project(const CameraModel& camera, const Vec3& point) {
  const Vec3 c = camera.to_camera(point);
  if (!(c.z() > kMinProjectDepth)) return std::nullopt;
  return Projection{camera.fx * c.x() / c.z() + camera.cx, camera.fy * c.y() / c.z() + camera.cy, c.z()};
}

Vec3 unproject(const CameraModel& camera, double u, double v, double depth) {
  const Vec3 c((u - camera.cx) / camera.fx * depth, (v - camera.cy) / camera.fy * depth, depth);
  return camera.to_world(c);
}

CameraModel recenter_subject(const Vec3& root_translation, const CameraModel& camera) {
  CameraModel out = camera;
  out.translation = camera.translation + camera.rotation * root_translation;
  return out;
}

FarthestVertex farthest_vertex(std::span<const Vec3> vertices, const CameraModel& camera) {
  if (vertices.empty()) throw InvalidInput("farthest_vertex: empty vertex set");
  const Vec3 eye = camera.center();
  FarthestVertex best{0, (vertices[0] - eye).norm()};
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    const double d = (vertices[i] - eye).norm();
    if (d > best.distance) best = {i, d};
  }
  return best;
}

void SceneConfig::validate() const {
  for (double d : {bed_gap, blanket_offset, blanket_width, blanket_length, bed_width, bed_length, bed_thickness,
                   detach_threshold}) {
    if (!(d > 0)) throw InvalidInput(fmt::format("scene distances must be positive (got {})", d));
  }
  if (sun_direction && !(sun_direction->norm() > 0 && sun_direction->allFinite()))
    throw InvalidInput("sun direction must be a non-zero finite vector");
}

TriangleMesh BedFrame::mesh() const {
  TriangleMesh m;
  const double hl = 0.5 * length, hw = 0.5 * width;
  // Corner index bits: bit0 → a1 (0 = top face, 1 = bottom), bit1 → a2, bit2 → a3.
  for (int i = 0; i < 8; ++i) {
    m.vertices.push_back(from_local(Vec3((i & 1) ? thickness : 0.0, (i & 2) ? hl : -hl, (i & 4) ? hw : -hw)));
  }
  // Quads listed counter-clockwise when seen from outside.
  const int quads[6][4] = {
      {0, 4, 6, 2},  // top (−a1 side)
      {1, 3, 7, 5},  // bottom
      {0, 1, 5, 4},  // −a2
      {2, 6, 7, 3},  // +a2
      {0, 2, 3, 1},  // −a3
      {4, 5, 7, 6},  // +a3
  };
  for (const auto& q : quads) {
    m.faces.push_back({static_cast<std::uint32_t>(q[0]), static_cast<std::uint32_t>(q[1]),
                       static_cast<std::uint32_t>(q[2])});
    m.faces.push_back({static_cast<std::uint32_t>(q[0]), static_cast<std::uint32_t>(q[2]),
                       static_cast<std::uint32_t>(q[3])});
  }
  return m;
}

BedFrame build_bed_frame(const Vec3& far_vertex, const CameraModel& camera, const SceneConfig& config,
                         std::span<const Vec3> body_vertices) {
  const Vec3 view = far_vertex - camera.center();
  if (!(view.norm() > 1e-12)) throw InvalidInput("far vertex coincides with the camera center");

  BedFrame bed;
  bed.origin = far_vertex;
  bed.a1 = view.normalized();
  Vec3 up = camera.up();
  Vec3 a2 = up - up.dot(bed.a1) * bed.a1;
  if (a2.norm() < 1e-9) {
    spdlog::warn("camera up is parallel to the bed normal; using camera right for the bed frame");
    bed.degenerate_up = true;
    const Vec3 right = camera.right();
    a2 = right - right.dot(bed.a1) * bed.a1;
  }
  bed.a2 = a2.normalized();
  bed.a3 = bed.a1.cross(bed.a2);
  bed.gap = config.bed_gap;
  bed.width = config.bed_width;
  bed.length = config.bed_length;
  bed.thickness = config.bed_thickness;

  if (!body_vertices.empty()) {
    double lo2 = std::numeric_limits<double>::infinity(), hi2 = -lo2, lo3 = lo2, hi3 = -lo2;
    for (const auto& v : body_vertices) {
      const Vec3 d = v - bed.origin;
      const double c2 = d.dot(bed.a2), c3 = d.dot(bed.a3);
      lo2 = std::min(lo2, c2);
      hi2 = std::max(hi2, c2);
      lo3 = std::min(lo3, c3);
      hi3 = std::max(hi3, c3);
    }
    bed.center_a2 = 0.5 * (lo2 + hi2);
    bed.center_a3 = 0.5 * (lo3 + hi3);
  }
  return bed;
}

BlanketPlacement init_blanket_placement(const BedFrame& bed, std::span<const Vec3> body_vertices,
                                        const SceneConfig& config) {
  if (body_vertices.empty()) throw InvalidInput("blanket placement needs a non-empty body");
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& v : body_vertices) nearest = std::min(nearest, (v - bed.origin).dot(bed.a1));

  BlanketPlacement p;
  p.center = bed.origin + (nearest - config.blanket_offset) * bed.a1 + bed.center_a2 * bed.a2 +
             bed.center_a3 * bed.a3;
  p.u_axis = bed.a3;
  p.v_axis = bed.a2;
  p.normal = -bed.a1;
  p.width = config.blanket_width;
  p.length = config.blanket_length;
  return p;
}

DirectionalLight sun_light(const SceneConfig& config, const BedFrame& bed) {
  DirectionalLight light;
  light.direction = config.sun_direction ? config.sun_direction->normalized() : bed.a1;
  return light;
}

}  // namespace drape
