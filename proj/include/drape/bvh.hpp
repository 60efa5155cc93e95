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

#include <cmath>
#include <cstdint>
#include <vector>

#include "drape/geometry.hpp"

namespace drape {

/// Which feature of the triangle the closest point lies on.
enum class TriangleFeature : std::uint8_t { Face, EdgeAB, EdgeBC, EdgeCA, VertexA, VertexB, VertexC };

struct TrianglePoint {
  Vec3 point = Vec3::Zero();
  double squared_distance = 0;
  TriangleFeature feature = TriangleFeature::Face;
  bool degenerate = false;  // area ≤ 1e-12 m², answered on the longest edge

  double distance() const { return std::sqrt(squared_distance); }
};

/// Exact closest point on a triangle (vertex, edge or face region).
TrianglePoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

struct MeshHit {
  std::size_t triangle = 0;
  Vec3 point = Vec3::Zero();
  double squared_distance = std::numeric_limits<double>::infinity();
  TriangleFeature feature = TriangleFeature::Face;

  double distance() const { return std::sqrt(squared_distance); }
};

/// Linear scan over all triangles; ties go to the lowest triangle index.
MeshHit brute_force_closest(const TriangleMesh& mesh, const Vec3& p);

/// AABB tree over mesh triangles. Topology is fixed at construction;
/// refit() updates boxes for new vertex positions with the same faces.
class Bvh {
 public:
  Bvh() = default;
  explicit Bvh(TriangleMesh mesh);

  void refit(const Points& vertices);

  /// Same result as brute_force_closest, including the tie rule.
  MeshHit closest(const Vec3& p) const;

  const TriangleMesh& mesh() const { return mesh_; }
  bool empty() const { return mesh_.faces.empty(); }
  std::size_t node_count() const { return nodes_.size(); }

  /// Every triangle lies inside its leaf box and every child box inside its parent.
  bool check_invariants() const;

 private:
  struct Node {
    Aabb box;
    std::uint32_t left = 0;   // left child, or first entry in order_ for leaves
    std::uint32_t right = 0;
    std::uint32_t count = 0;  // > 0 marks a leaf
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids);
  Aabb triangle_box(std::size_t t) const;
  void refit_node(std::uint32_t n);

  TriangleMesh mesh_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
};

}  // namespace drape
