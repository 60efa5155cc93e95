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


#include "drape/cloth_sim.hpp"

#include <cmath>
#include <map>

#include <fmt/format.h>

namespace drape {

Vec3 ClothGrid::centroid() const {
  Vec3 c = Vec3::Zero();
  for (const auto& p : positions) c += p;
  return positions.empty() ? c : Vec3(c / static_cast<double>(positions.size()));
}

double ClothGrid::kinetic_energy() const {
  double sum = 0;
  for (const auto& v : velocities) sum += v.squaredNorm();
  return 0.5 * particle_mass * sum;
}

TriangleMesh ClothGrid::mesh() const {
  return {positions, grid_faces(grid_res)};
}

ClothGrid build_cloth(const BlanketPlacement& placement, int grid_res, double total_mass) {
  if (grid_res < 2) throw InvalidInput(fmt::format("grid_res must be at least 2 (got {})", grid_res));
  if (!(total_mass > 0)) throw InvalidInput("cloth mass must be positive");
  ClothGrid cloth;
  cloth.grid_res = grid_res;
  const int n = grid_res;
  const std::size_t count = static_cast<std::size_t>(n) * n;
  cloth.particle_mass = total_mass / static_cast<double>(count);
  cloth.positions.resize(count);
  cloth.velocities.assign(count, Vec3::Zero());

  // Integer numerators keep the grid exactly mirror-symmetric about its center.
  const double denom = 2.0 * (n - 1);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double s = static_cast<double>(2 * i - (n - 1)) / denom;
      const double t = static_cast<double>(2 * j - (n - 1)) / denom;
      cloth.positions[static_cast<std::size_t>(j * n + i)] =
          placement.center + (s * placement.width) * placement.u_axis + (t * placement.length) * placement.v_axis;
    }
  }

  auto idx = [n](int i, int j) { return static_cast<std::uint32_t>(j * n + i); };
  auto add = [&](std::uint32_t a, std::uint32_t b, ConstraintKind kind) {
    const double rest = (cloth.positions[a] - cloth.positions[b]).norm();
    cloth.constraints.push_back({a, b, rest, kind});
  };

  // Batches of independent constraints. The batch order is symmetric under
  // mirroring the width axis when grid_res is a multiple of 4.
  for (int parity = 0; parity < 2; ++parity)
    for (int j = 0; j < n; ++j)
      for (int i = parity; i + 1 < n; i += 2) add(idx(i, j), idx(i + 1, j), ConstraintKind::Structural);
  for (int parity = 0; parity < 2; ++parity)
    for (int j = parity; j + 1 < n; j += 2)
      for (int i = 0; i < n; ++i) add(idx(i, j), idx(i, j + 1), ConstraintKind::Structural);
  for (int pj = 0; pj < 2; ++pj)
    for (int pi = 0; pi < 2; ++pi)
      for (int j = pj; j + 1 < n; j += 2)
        for (int i = pi; i + 1 < n; i += 2) {
          add(idx(i, j), idx(i + 1, j + 1), ConstraintKind::Shear);
          add(idx(i + 1, j), idx(i, j + 1), ConstraintKind::Shear);
        }
  for (int color = 0; color < 2; ++color)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i + 2 < n; ++i)
        if ((i / 2) % 2 == color) add(idx(i, j), idx(i + 2, j), ConstraintKind::Bending);
  for (int color = 0; color < 2; ++color)
    for (int j = 0; j + 2 < n; ++j)
      if ((j / 2) % 2 == color)
        for (int i = 0; i < n; ++i) add(idx(i, j), idx(i, j + 2), ConstraintKind::Bending);
  return cloth;
}

// ---------------------------------------------------------------------------
// Colliders

BodyCollider::BodyCollider(TriangleMesh mesh) : bvh_(std::move(mesh)) {
  const auto& faces = bvh_.mesh().faces;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> ids;
  face_edges_.resize(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (int e = 0; e < 3; ++e) {
      auto a = faces[f][e], b = faces[f][(e + 1) % 3];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = ids.try_emplace({a, b}, static_cast<std::uint32_t>(edge_faces_.size()));
      if (inserted) edge_faces_.emplace_back();
      edge_faces_[it->second].push_back(static_cast<std::uint32_t>(f));
      face_edges_[f][e] = it->second;
    }
  }
  compute_normals();
}

void BodyCollider::update(const Points& vertices) {
  bvh_.refit(vertices);
  compute_normals();
}

void BodyCollider::compute_normals() {
  const auto& mesh = bvh_.mesh();
  face_normals_.resize(mesh.faces.size());
  vertex_normals_.assign(mesh.vertices.size(), Vec3::Zero());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& tri = mesh.faces[f];
    const Vec3 n = (mesh.vertices[tri[1]] - mesh.vertices[tri[0]]).cross(mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
    const double len = n.norm();
    face_normals_[f] = len > 0 ? Vec3(n / len) : Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
      const Vec3 e1 = mesh.vertices[tri[(k + 1) % 3]] - mesh.vertices[tri[k]];
      const Vec3 e2 = mesh.vertices[tri[(k + 2) % 3]] - mesh.vertices[tri[k]];
      const double denom = e1.norm() * e2.norm();
      if (denom <= 0) continue;
      const double angle = std::acos(std::clamp(e1.dot(e2) / denom, -1.0, 1.0));
      vertex_normals_[tri[k]] += angle * face_normals_[f];
    }
  }
  for (auto& n : vertex_normals_) n.normalize();
  edge_normals_.resize(edge_faces_.size());
  for (std::size_t e = 0; e < edge_faces_.size(); ++e) {
    Vec3 n = Vec3::Zero();
    for (auto f : edge_faces_[e]) n += face_normals_[f];
    edge_normals_[e] = n.normalized();
  }
}

BodyCollider::Contact BodyCollider::query(const Vec3& p) const {
  Contact c;
  c.hit = bvh_.closest(p);
  const auto& tri = bvh_.mesh().faces[c.hit.triangle];
  const auto& fe = face_edges_[c.hit.triangle];
  switch (c.hit.feature) {
    case TriangleFeature::Face: c.normal = face_normals_[c.hit.triangle]; break;
    case TriangleFeature::EdgeAB: c.normal = edge_normals_[fe[0]]; break;
    case TriangleFeature::EdgeBC: c.normal = edge_normals_[fe[1]]; break;
    case TriangleFeature::EdgeCA: c.normal = edge_normals_[fe[2]]; break;
    case TriangleFeature::VertexA: c.normal = vertex_normals_[tri[0]]; break;
    case TriangleFeature::VertexB: c.normal = vertex_normals_[tri[1]]; break;
    case TriangleFeature::VertexC: c.normal = vertex_normals_[tri[2]]; break;
  }
  c.inside = (p - c.hit.point).dot(c.normal) < 0;
  return c;
}

namespace {

bool push_from_body(const BodyCollider& body, double margin, Vec3& p) {
  const auto contact = body.query(p);
  const double dist = contact.hit.distance();
  if (!contact.inside && dist >= margin) return false;
  if (!contact.inside && dist > 1e-12) {
    p = contact.hit.point + (p - contact.hit.point) * (margin / dist);
  } else {
    p = contact.hit.point + margin * contact.normal;
  }
  return true;
}

bool push_from_sphere(const Sphere& s, double margin, Vec3& p) {
  const Vec3 d = p - s.center;
  const double len = d.norm();
  const double target = s.radius + margin;
  if (len >= target) return false;
  p = s.center + (len > 0 ? Vec3(d / len) : Vec3::UnitX()) * target;
  return true;
}

bool push_from_bed(const BedFrame& bed, double margin, Vec3& p) {
  const Vec3 l = bed.local(p);
  const double hl = 0.5 * bed.length + margin, hw = 0.5 * bed.width + margin;
  if (!(l[0] > -margin && l[0] < bed.thickness + margin && std::abs(l[1]) < hl && std::abs(l[2]) < hw))
    return false;
  // Exit through the face with the smallest penetration.
  const double exits[6] = {l[0] + margin, bed.thickness + margin - l[0], l[1] + hl, hl - l[1], l[2] + hw, hw - l[2]};
  int best = 0;
  for (int k = 1; k < 6; ++k)
    if (exits[k] < exits[best]) best = k;
  Vec3 out = l;
  switch (best) {
    case 0: out[0] = -margin; break;
    case 1: out[0] = bed.thickness + margin; break;
    case 2: out[1] = -hl; break;
    case 3: out[1] = hl; break;
    case 4: out[2] = -hw; break;
    default: out[2] = hw; break;
  }
  p = bed.from_local(out);
  return true;
}

void project_constraints(ClothGrid& cloth, const SimParams& params) {
  // Iteration-count independent stiffness: k' = 1 − (1 − k)^(1/n).
  const double iters = static_cast<double>(params.constraint_iterations);
  const double k_stretch = 1.0 - std::pow(1.0 - params.stretch_stiffness, 1.0 / iters);
  const double k_bend = 1.0 - std::pow(1.0 - params.bend_stiffness, 1.0 / iters);
  auto& x = cloth.positions;
  for (int it = 0; it < params.constraint_iterations; ++it) {
    for (const auto& c : cloth.constraints) {
      const Vec3 d = x[c.b] - x[c.a];
      const double len = d.norm();
      if (len <= 0) continue;
      const double k = c.kind == ConstraintKind::Bending ? k_bend : k_stretch;
      // Equal particle masses: each end takes half of the correction.
      const Vec3 corr = (0.5 * k * (len - c.rest_length) / len) * d;
      x[c.a] += corr;
      x[c.b] -= corr;
    }
  }
}

}  // namespace

bool project_out_of_colliders(const ColliderSet& colliders, Vec3& p) {
  bool moved = false;
  for (const auto& s : colliders.spheres) moved |= push_from_sphere(s, colliders.margin, p);
  if (colliders.bed) moved |= push_from_bed(*colliders.bed, colliders.margin, p);
  if (colliders.body && !colliders.body->bvh().empty()) moved |= push_from_body(*colliders.body, colliders.margin, p);
  return moved;
}

void SimParams::validate() const {
  if (!(dt > 0)) throw InvalidInput("dt must be positive");
  if (substeps < 1) throw InvalidInput("substeps must be at least 1");
  if (collision_iterations < 0 || constraint_iterations < 0) throw InvalidInput("iteration counts must be >= 0");
  if (!(stretch_stiffness >= 0 && stretch_stiffness <= 1 && bend_stiffness >= 0 && bend_stiffness <= 1))
    throw InvalidInput("stiffness must be in [0, 1]");
  if (!(damping >= 0 && damping < 1)) throw InvalidInput("damping must be in [0, 1)");
  if (!(gravity_direction.norm() > 0)) throw InvalidInput("gravity direction must be non-zero");
}

ClothGrid step(ClothGrid cloth, const ColliderSet& colliders, const SimParams& params) {
  params.validate();
  const double h = params.dt / params.substeps;
  const Vec3 g = params.gravity * params.gravity_direction.normalized();
  const Vec3 half_gh = 0.5 * h * g;
  const Vec3 half_ghh = 0.5 * h * h * g;
  const bool has_colliders = colliders.body || colliders.bed || !colliders.spheres.empty();
  const std::size_t n = cloth.particle_count();
  Points previous(n);

  for (int s = 0; s < params.substeps; ++s) {
    // Constant-acceleration prediction; the velocity update below recovers
    // v + g·h exactly for an unconstrained particle.
    for (std::size_t i = 0; i < n; ++i) {
      previous[i] = cloth.positions[i];
      cloth.velocities[i] *= (1.0 - params.damping);
      cloth.positions[i] += h * cloth.velocities[i] + half_ghh;
    }
    if (params.constraint_iterations > 0) project_constraints(cloth, params);
    if (has_colliders) {
      for (auto& p : cloth.positions) {
        for (int it = 0; it < params.collision_iterations; ++it)
          if (!project_out_of_colliders(colliders, p)) break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      cloth.velocities[i] = (cloth.positions[i] - previous[i]) / h + half_gh;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!cloth.positions[i].allFinite() || !cloth.velocities[i].allFinite())
      throw SimulationError(fmt::format("cloth particle {} became non-finite", i));
  }
  return cloth;
}

void write_telemetry_line(std::ostream& out, const FrameTelemetry& t) {
  out << fmt::format("{}\t{:.9g}\t{:.9g}\n", t.frame, t.min_body_distance, t.kinetic_energy);
}

ClothGrid warmup(ClothGrid cloth, const ColliderSet& colliders, const SimParams& params, int frames,
                 const TelemetrySink& telemetry) {
  for (int f = 0; f < frames; ++f) {
    cloth = step(std::move(cloth), colliders, params);
    if (telemetry) {
      const double d = colliders.body ? min_distance_to_body(cloth.positions, colliders.body->bvh())
                                      : std::numeric_limits<double>::infinity();
      telemetry({f - frames, d, cloth.kinetic_energy()});
    }
  }
  return cloth;
}

double min_distance_to_body(const Points& particles, const Bvh& body) {
  if (particles.empty() || body.empty()) throw InvalidInput("min_distance_to_body: empty cloth or body");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : particles) best = std::min(best, body.closest(p).squared_distance);
  return std::sqrt(best);
}

}  // namespace drape
