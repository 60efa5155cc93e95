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

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "drape/bvh.hpp"
#include "drape/geometry.hpp"
#include "drape/scene_setup.hpp"

namespace drape {

enum class ConstraintKind : std::uint8_t { Structural, Shear, Bending };

struct DistanceConstraint {
  std::uint32_t a = 0, b = 0;
  double rest_length = 0;
  ConstraintKind kind = ConstraintKind::Structural;
};

/// Particle grid of grid_res × grid_res particles, index j·grid_res + i with i
/// along the width axis. Constraints are stored in solve order: batches of
/// mutually independent constraints, so the sweep is a colored Gauss–Seidel
/// whose result does not depend on the order inside a batch.
struct ClothGrid {
  int grid_res = 0;
  Points positions;
  Points velocities;
  std::vector<DistanceConstraint> constraints;
  double particle_mass = 0;

  std::size_t particle_count() const { return positions.size(); }
  Vec3 centroid() const;
  double kinetic_energy() const;
  /// Two triangles per grid cell.
  TriangleMesh mesh() const;
};

ClothGrid build_cloth(const BlanketPlacement& placement, int grid_res, double total_mass);

/// Body collider: mesh + BVH + angle-weighted pseudo-normals for the
/// inside/outside test.
class BodyCollider {
 public:
  BodyCollider() = default;
  explicit BodyCollider(TriangleMesh mesh);

  /// Moves the vertices (same topology) and refits the BVH.
  void update(const Points& vertices);

  struct Contact {
    MeshHit hit;
    Vec3 normal = Vec3::Zero();  // outward pseudo-normal at the closest feature
    bool inside = false;
  };
  Contact query(const Vec3& p) const;

  const Bvh& bvh() const { return bvh_; }

 private:
  void compute_normals();

  Bvh bvh_;
  std::vector<Vec3> face_normals_;
  std::vector<Vec3> vertex_normals_;
  std::vector<std::array<std::uint32_t, 3>> face_edges_;  // edge id for AB, BC, CA
  std::vector<Vec3> edge_normals_;
  std::vector<std::vector<std::uint32_t>> edge_faces_;
};

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

struct ColliderSet {
  std::optional<BodyCollider> body;
  std::optional<BedFrame> bed;
  std::vector<Sphere> spheres;
  double margin = 0.0005;
};

/// Pushes p out of every collider to at least `margin` from its surface.
/// Returns true when p moved.
bool project_out_of_colliders(const ColliderSet& colliders, Vec3& p);

struct SimParams {
  double dt = 1.0 / 30.0;
  int substeps = 15;
  int collision_iterations = 10;
  int constraint_iterations = 10;
  double gravity = 9.81;
  Vec3 gravity_direction = Vec3::UnitZ();  // +a1, into the bed
  double damping = 0.02;                   // velocity fraction removed per substep
  double stretch_stiffness = 1.0;          // structural and shear
  double bend_stiffness = 0.2;

  void validate() const;
};

/// Advances one video frame. Throws SimulationError on non-finite state.
ClothGrid step(ClothGrid cloth, const ColliderSet& colliders, const SimParams& params);

struct FrameTelemetry {
  int frame = 0;
  double min_body_distance = 0;
  double kinetic_energy = 0;
};

/// Tab-separated: frame, min body distance, kinetic energy.
void write_telemetry_line(std::ostream& out, const FrameTelemetry& t);

using TelemetrySink = std::function<void(const FrameTelemetry&)>;

/// Steps `frames` times against fixed colliders. Warm-up telemetry frames
/// are numbered −frames … −1.
ClothGrid warmup(ClothGrid cloth, const ColliderSet& colliders, const SimParams& params, int frames = 24,
                 const TelemetrySink& telemetry = {});

double min_distance_to_body(const Points& particles, const Bvh& body);

inline bool is_detached(double distance, double threshold) { return distance > threshold; }

}  // namespace drape
