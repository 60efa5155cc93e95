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

#include <optional>
#include <span>

#include "drape/geometry.hpp"

namespace drape {

/// Pinhole camera. Extrinsics map world to camera: x_cam = rotation · x + translation.
/// The camera looks down +z, image x to the right and y downward.
struct CameraModel {
  double fx = 1.0, fy = 1.0, cx = 0.5, cy = 0.5;
  int width = 1, height = 1;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 to_camera(const Vec3& world) const { return rotation * world + translation; }
  Vec3 to_world(const Vec3& cam) const { return rotation.transpose() * (cam - translation); }
  Vec3 center() const { return -rotation.transpose() * translation; }
  /// World direction of the image −v axis.
  Vec3 up() const { return rotation.transpose() * Vec3(0, -1, 0); }
  Vec3 right() const { return rotation.transpose() * Vec3(1, 0, 0); }
  /// World direction of the optical axis.
  Vec3 forward() const { return rotation.transpose() * Vec3(0, 0, 1); }

  void validate() const;
};

struct Projection {
  double u = 0, v = 0;
  double depth = 0;
};

inline constexpr double kMinProjectDepth = 1e-6;

/// std::nullopt marks a point behind (or on) the camera plane.
std::optional<Projection> project(const CameraModel& camera, const Vec3& point);
Vec3 unproject(const CameraModel& camera, double u, double v, double depth);

/// Moves the camera so that the subject can be posed at the origin.
CameraModel recenter_subject(const Vec3& root_translation, const CameraModel& camera);

struct FarthestVertex {
  std::size_t index = 0;
  double distance = 0;
};
FarthestVertex farthest_vertex(std::span<const Vec3> vertices, const CameraModel& camera);

struct SceneConfig {
  double bed_gap = 0.02;
  double blanket_offset = 0.05;
  double blanket_width = 1.6;
  double blanket_length = 2.2;
  double bed_width = 2.0;
  double bed_length = 3.0;
  double bed_thickness = 0.3;
  std::optional<Vec3> sun_direction;  // defaults to the bed's away-from-camera axis
  double detach_threshold = 0.30;

  void validate() const;
};

/// Orthonormal frame anchored at the body vertex farthest from the camera.
/// a1 points away from the camera, a2 is camera-up, a3 = a1 × a2. Width runs
/// along a3 and length along a2.
struct BedFrame {
  Vec3 origin = Vec3::Zero();
  Vec3 a1 = Vec3::UnitZ(), a2 = -Vec3::UnitY(), a3 = Vec3::UnitX();
  double gap = 0.02;
  // In-plane center of the top face, as (a2, a3) coordinates relative to origin.
  double center_a2 = 0, center_a3 = 0;
  double width = 2.0, length = 3.0, thickness = 0.3;
  bool degenerate_up = false;

  /// Distance of the top face from origin along a1.
  double top_offset() const { return gap; }
  Vec3 top_center() const { return origin + gap * a1 + center_a2 * a2 + center_a3 * a3; }
  /// Coordinates of p in the (a1, a2, a3) frame relative to the top center.
  Vec3 local(const Vec3& p) const {
    const Vec3 d = p - top_center();
    return {d.dot(a1), d.dot(a2), d.dot(a3)};
  }
  Vec3 from_local(const Vec3& l) const { return top_center() + l[0] * a1 + l[1] * a2 + l[2] * a3; }
  /// Signed distance from p to the top plane, positive on the camera side.
  double top_plane_distance(const Vec3& p) const { return -local(p)[0]; }
  /// Closed 12-triangle cuboid, outward winding.
  TriangleMesh mesh() const;
};

/// Builds the bed frame. When body vertices are supplied the top face is
/// centered on the body's bounding box as seen in the bed plane; otherwise on
/// the far vertex.
BedFrame build_bed_frame(const Vec3& far_vertex, const CameraModel& camera, const SceneConfig& config,
                         std::span<const Vec3> body_vertices = {});

struct BlanketPlacement {
  Vec3 center = Vec3::Zero();
  Vec3 u_axis = Vec3::UnitX();  // width direction (a3)
  Vec3 v_axis = Vec3::UnitY();  // length direction (a2)
  Vec3 normal = Vec3::UnitZ();  // toward the camera (−a1)
  double width = 1.6, length = 2.2;
};

BlanketPlacement init_blanket_placement(const BedFrame& bed, std::span<const Vec3> body_vertices,
                                        const SceneConfig& config);

struct DirectionalLight {
  Vec3 direction = Vec3::UnitZ();  // direction the rays travel
  double intensity = 1.0;
};

DirectionalLight sun_light(const SceneConfig& config, const BedFrame& bed);

}  // namespace drape
