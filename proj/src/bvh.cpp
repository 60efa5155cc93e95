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


#include "drape/bvh.hpp"

#include <algorithm>
#include <numeric>

namespace drape {
namespace {

using F = TriangleFeature;

TrianglePoint closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b, F edge) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  TrianglePoint r;
  r.point = a + t * ab;
  r.squared_distance = (p - r.point).squaredNorm();
  r.feature = edge;
  r.degenerate = true;
  return r;
}

TrianglePoint at(const Vec3& p, const Vec3& q, F feature) { return {q, (p - q).squaredNorm(), feature, false}; }

}  // namespace

TrianglePoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a;
  if (0.5 * ab.cross(ac).norm() <= 1e-12) {
    const double lab = ab.squaredNorm(), lac = ac.squaredNorm(), lbc = (c - b).squaredNorm();
    if (lab >= lac && lab >= lbc) return closest_on_segment(p, a, b, F::EdgeAB);
    if (lac >= lbc) return closest_on_segment(p, c, a, F::EdgeCA);
    return closest_on_segment(p, b, c, F::EdgeBC);
  }

  // Voronoi-region walk (Ericson, Real-Time Collision Detection 5.1.5).
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return at(p, a, F::VertexA);

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return at(p, b, F::VertexB);

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return at(p, a + d1 / (d1 - d3) * ab, F::EdgeAB);

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return at(p, c, F::VertexC);

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return at(p, a + d2 / (d2 - d6) * ac, F::EdgeCA);

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return at(p, b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b), F::EdgeBC);

  const double denom = 1.0 / (va + vb + vc);
  return at(p, a + ab * (vb * denom) + ac * (vc * denom), F::Face);
}

MeshHit brute_force_closest(const TriangleMesh& mesh, const Vec3& p) {
  MeshHit best;
  for (std::size_t t = 0; t < mesh.faces.size(); ++t) {
    const auto& f = mesh.faces[t];
    const auto r = closest_point_on_triangle(p, mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
    if (r.squared_distance < best.squared_distance) best = {t, r.point, r.squared_distance, r.feature};
  }
  return best;
}

Bvh::Bvh(TriangleMesh mesh) : mesh_(std::move(mesh)) {
  const auto n = static_cast<std::uint32_t>(mesh_.faces.size());
  if (n == 0) return;
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  std::vector<Vec3> centroids(n);
  for (std::uint32_t t = 0; t < n; ++t) {
    const auto& f = mesh_.faces[t];
    centroids[t] = (mesh_.vertices[f[0]] + mesh_.vertices[f[1]] + mesh_.vertices[f[2]]) / 3.0;
  }
  nodes_.reserve(2 * n);
  build(0, n, centroids);
}

Aabb Bvh::triangle_box(std::size_t t) const {
  Aabb b;
  for (auto v : mesh_.faces[t]) b.extend(mesh_.vertices[v]);
  return b;
}

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids) {
  constexpr std::uint32_t kLeafSize = 4;
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Aabb box, cbox;
  for (auto i = begin; i < end; ++i) {
    box.extend(triangle_box(order_[i]));
    cbox.extend(centroids[order_[i]]);
  }
  nodes_[index].box = box;
  if (end - begin <= kLeafSize) {
    nodes_[index].left = begin;
    nodes_[index].count = end - begin;
    return index;
  }
  int axis = 0;
  cbox.extent().maxCoeff(&axis);
  const auto mid = begin + (end - begin) / 2;
  std::sort(order_.begin() + begin, order_.begin() + end, [&](std::uint32_t x, std::uint32_t y) {
    const double cx = centroids[x][axis], cy = centroids[y][axis];
    return cx < cy || (cx == cy && x < y);
  });
  const auto left = build(begin, mid, centroids);
  const auto right = build(mid, end, centroids);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

void Bvh::refit(const Points& vertices) {
  if (vertices.size() != mesh_.vertices.size())
    throw InvalidInput("Bvh::refit: vertex count differs from the built mesh");
  mesh_.vertices = vertices;
  if (!nodes_.empty()) refit_node(0);
}

void Bvh::refit_node(std::uint32_t n) {
  Node& node = nodes_[n];
  Aabb box;
  if (node.count > 0) {
    for (auto i = node.left; i < node.left + node.count; ++i) box.extend(triangle_box(order_[i]));
  } else {
    const auto left = node.left, right = node.right;
    refit_node(left);
    refit_node(right);
    box = nodes_[left].box;
    box.extend(nodes_[right].box);
  }
  nodes_[n].box = box;
}

MeshHit Bvh::closest(const Vec3& p) const {
  MeshHit best;
  if (nodes_.empty()) return best;
  // Box distances are lower bounds; a small relative slack keeps rounding in
  // the box test from pruning a triangle that ties with the current best.
  constexpr double kSlack = 1.0 + 1e-9;
  std::uint32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.box.squared_distance(p) > best.squared_distance * kSlack) continue;
    if (node.count > 0) {
      for (auto i = node.left; i < node.left + node.count; ++i) {
        const auto t = order_[i];
        const auto& f = mesh_.faces[t];
        const auto r =
            closest_point_on_triangle(p, mesh_.vertices[f[0]], mesh_.vertices[f[1]], mesh_.vertices[f[2]]);
        if (r.squared_distance < best.squared_distance ||
            (r.squared_distance == best.squared_distance && t < best.triangle)) {
          best = {t, r.point, r.squared_distance, r.feature};
        }
      }
      continue;
    }
    const auto left = node.left, right = node.right;
    const double dl = nodes_[left].box.squared_distance(p);
    const double dr = nodes_[right].box.squared_distance(p);
    // Push the farther child first so the nearer one is visited next.
    if (dl <= dr) {
      stack[top++] = right;
      stack[top++] = left;
    } else {
      stack[top++] = left;
      stack[top++] = right;
    }
  }
  return best;
}

bool Bvh::check_invariants() const {
  if (nodes_.empty()) return mesh_.faces.empty();
  auto inside = [](const Aabb& inner, const Aabb& outer) {
    return (inner.lo.array() >= outer.lo.array()).all() && (inner.hi.array() <= outer.hi.array()).all();
  };
  std::vector<bool> seen(mesh_.faces.size(), false);
  for (std::uint32_t n = 0; n < nodes_.size(); ++n) {
    const Node& node = nodes_[n];
    if (node.count > 0) {
      for (auto i = node.left; i < node.left + node.count; ++i) {
        if (!inside(triangle_box(order_[i]), node.box)) return false;
        if (seen[order_[i]]) return false;
        seen[order_[i]] = true;
      }
    } else if (!inside(nodes_[node.left].box, node.box) || !inside(nodes_[node.right].box, node.box)) {
      return false;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

}  // namespace drape
