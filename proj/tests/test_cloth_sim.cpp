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


#include <set>
#include <sstream>
#include <tuple>

#include <doctest.h>

#include "drape/cloth_sim.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace drape;

namespace {

BlanketPlacement unit_placement() {
  BlanketPlacement p;
  p.width = p.length = 1.0;
  return p;
}

ClothGrid free_particles(Points positions, Points velocities) {
  ClothGrid c;
  c.positions = std::move(positions);
  c.velocities = std::move(velocities);
  c.particle_mass = 1;
  return c;
}

}  // namespace

TEST_CASE("cloth counts") {
  const ClothGrid small = build_cloth(unit_placement(), 2, 1.0);
  CHECK(small.particle_count() == 4);
  CHECK(small.constraints.size() == 4 + 2);
  CHECK(small.particle_mass == 0.25);

  const ClothGrid full = build_cloth(unit_placement(), 76, 0.3);
  CHECK(full.particle_count() == 5776);
  std::size_t structural = 0, shear = 0, bending = 0;
  for (const auto& c : full.constraints) {
    structural += c.kind == ConstraintKind::Structural;
    shear += c.kind == ConstraintKind::Shear;
    bending += c.kind == ConstraintKind::Bending;
  }
  CHECK(structural == 2 * 76 * 75);
  CHECK(shear == 2 * 75 * 75);
  CHECK(bending == 2 * 76 * 74);
  CHECK(full.mesh().faces.size() == 2 * 75 * 75);
  CHECK_THROWS_AS(build_cloth(unit_placement(), 1, 1.0), InvalidInput);
  CHECK_THROWS_AS(build_cloth(unit_placement(), 4, 0.0), InvalidInput);
}

TEST_CASE("constraint graph equals the neighbor enumeration") {
  const int n = 9;
  BlanketPlacement place = unit_placement();
  place.width = 1.2;
  place.length = 0.8;
  const ClothGrid cloth = build_cloth(place, n, 1.0);
  using Key = std::tuple<int, std::uint32_t, std::uint32_t>;
  std::set<Key> got, want;
  for (const auto& c : cloth.constraints) {
    const auto lo = std::min(c.a, c.b), hi = std::max(c.a, c.b);
    CHECK(got.insert({static_cast<int>(c.kind), lo, hi}).second);
    CHECK(std::abs(c.rest_length - (cloth.positions[c.a] - cloth.positions[c.b]).norm()) < 1e-15);
  }
  auto id = [n](int i, int j) { return static_cast<std::uint32_t>(j * n + i); };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      auto put = [&](ConstraintKind k, int di, int dj) {
        const int i2 = i + di, j2 = j + dj;
        if (i2 < 0 || i2 >= n || j2 >= n) return;
        const auto a = id(i, j), b = id(i2, j2);
        want.insert({static_cast<int>(k), std::min(a, b), std::max(a, b)});
      };
      put(ConstraintKind::Structural, 1, 0);
      put(ConstraintKind::Structural, 0, 1);
      put(ConstraintKind::Shear, 1, 1);
      put(ConstraintKind::Shear, -1, 1);
      put(ConstraintKind::Bending, 2, 0);
      put(ConstraintKind::Bending, 0, 2);
    }
  CHECK(got == want);

  // Grid spacing matches the blanket size.
  CHECK((cloth.positions[id(n - 1, 0)] - cloth.positions[id(0, 0)]).norm() == doctest::Approx(1.2));
  CHECK((cloth.positions[id(0, n - 1)] - cloth.positions[id(0, 0)]).norm() == doctest::Approx(0.8));
  CHECK(cloth.centroid().norm() < 1e-15);
}

TEST_CASE("constraints in a batch touch disjoint particles") {
  // Splitting the list greedily into runs of particle-disjoint constraints
  // recovers exactly the color batches.
  const ClothGrid cloth = build_cloth(unit_placement(), 12, 1.0);
  std::size_t batches = 0;
  std::set<std::uint32_t> used;
  for (const auto& c : cloth.constraints) {
    if (used.count(c.a) || used.count(c.b)) {
      used.clear();
      ++batches;
    }
    used.insert(c.a);
    used.insert(c.b);
  }
  ++batches;
  // 2 structural-x, 2 structural-y, 4 shear, 2 + 2 bending colors.
  CHECK(batches == 12);
}

TEST_CASE("free particle gains g·dt per frame") {
  SimParams params;
  params.damping = 0;
  params.gravity_direction = Vec3(0, 0, 2);
  ClothGrid c = free_particles({Vec3(1, 2, 3)}, {Vec3(0.5, 0, 0)});
  c = step(c, ColliderSet{}, params);
  CHECK((c.velocities[0] - Vec3(0.5, 0, 9.81 / 30)).norm() < 1e-12);
  const double t = 1.0 / 30;
  CHECK((c.positions[0] - Vec3(1 + 0.5 * t, 2, 3 + 0.5 * 9.81 * t * t)).norm() < 1e-12);
}

TEST_CASE("ballistic motion is exact") {
  SimParams params;
  params.damping = 0;
  params.gravity_direction = Vec3(1, -1, 2);
  const Vec3 g = params.gravity * params.gravity_direction.normalized();
  BlanketPlacement place = unit_placement();
  place.center = Vec3(0.3, -0.2, 1);
  ClothGrid cloth = build_cloth(place, 8, 0.3);
  const Vec3 v0(0.4, 0.1, -2);
  for (auto& v : cloth.velocities) v = v0;
  const Points start = cloth.positions;
  double worst = 0;
  for (int f = 1; f <= 100; ++f) {
    cloth = step(std::move(cloth), ColliderSet{}, params);
    const double t = f * params.dt;
    for (std::size_t i = 0; i < start.size(); ++i) {
      worst = std::max(worst, (cloth.positions[i] - (start[i] + v0 * t + 0.5 * g * t * t)).norm());
      worst = std::max(worst, (cloth.velocities[i] - (v0 + g * t)).norm());
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("single distance constraint with full stiffness") {
  SimParams params;
  params.gravity = 0;
  params.damping = 0;
  params.substeps = 1;
  params.constraint_iterations = 1;
  ClothGrid c = free_particles({Vec3(0, 0, 0), Vec3(2, 0, 0)}, {Vec3::Zero(), Vec3::Zero()});
  c.constraints.push_back({0, 1, 1.0, ConstraintKind::Structural});
  c = step(c, ColliderSet{}, params);
  CHECK((c.positions[0] - Vec3(0.5, 0, 0)).norm() < 1e-15);
  CHECK((c.positions[1] - Vec3(1.5, 0, 0)).norm() < 1e-15);
  CHECK((c.velocities[0] - Vec3(0.5 * 30, 0, 0)).norm() < 1e-9);

  // Stiffness k spread over N iterations closes the fraction k of the gap.
  ClothGrid d = free_particles({Vec3(0, 0, 0), Vec3(2, 0, 0)}, {Vec3::Zero(), Vec3::Zero()});
  d.constraints.push_back({0, 1, 1.0, ConstraintKind::Bending});
  params.bend_stiffness = 0.36;
  params.constraint_iterations = 2;
  d = step(d, ColliderSet{}, params);
  CHECK((d.positions[1] - d.positions[0]).norm() == doctest::Approx(2 - 0.36).epsilon(1e-12));
}

TEST_CASE("collision projection") {
  ColliderSet set;
  set.margin = 0.01;
  set.spheres.push_back({Vec3(1, 0, 0), 0.5});
  Vec3 p(1.1, 0, 0);
  CHECK(project_out_of_colliders(set, p));
  CHECK((p - Vec3(1.51, 0, 0)).norm() < 1e-12);
  CHECK_FALSE(project_out_of_colliders(set, p));

  ColliderSet body;
  body.margin = 0.002;
  body.body.emplace(fixture::uv_sphere(Vec3::Zero(), 0.5, 16, 32));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0, 1);
  for (int k = 0; k < 500; ++k) {
    const Vec3 dir = Vec3(n(rng), n(rng), n(rng)).normalized();
    Vec3 q = dir * 0.3;
    CHECK(body.body->query(q).inside);
    CHECK(project_out_of_colliders(body, q));
    const auto c = body.body->query(q);
    CHECK_FALSE(c.inside);
    CHECK(c.hit.distance() >= body.margin - 1e-12);
    Vec3 outside = dir * 0.8;
    CHECK_FALSE(body.body->query(outside).inside);
    CHECK_FALSE(project_out_of_colliders(body, outside));
  }

  ColliderSet bed;
  bed.margin = 0.001;
  bed.bed.emplace();
  Vec3 b = bed.bed->from_local(Vec3(0.05, 0.1, 0.2));
  CHECK(project_out_of_colliders(bed, b));
  CHECK(bed.bed->local(b)[0] == doctest::Approx(-0.001));
}

TEST_CASE("min distance against the oracle") {
  const TriangleMesh mesh = fixture::tie_mesh(4);
  const Bvh bvh(mesh);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Points pts(300);
  for (auto& p : pts) p = Vec3(u(rng), u(rng), u(rng));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pts)
    for (const auto& f : mesh.faces)
      best = std::min(best, (oracle::closest_on_triangle(p, mesh.vertices[f[0]], mesh.vertices[f[1]],
                                                         mesh.vertices[f[2]]) -
                             p)
                                .norm());
  CHECK(std::abs(min_distance_to_body(pts, bvh) - best) < 1e-9);
  CHECK_THROWS_AS(min_distance_to_body({}, bvh), InvalidInput);
}

TEST_CASE("detach boundary") {
  CHECK_FALSE(is_detached(0.30, 0.30));
  CHECK(is_detached(std::nextafter(0.30, 1.0), 0.30));
  CHECK_FALSE(is_detached(0.0, 0.30));
}

TEST_CASE("sphere drape rests on the margin") {
  auto scene = fixture::sphere_drape(24);
  double lowest = std::numeric_limits<double>::infinity(), last = 0;
  for (int f = 0; f < 60; ++f) {
    scene.cloth = step(std::move(scene.cloth), scene.colliders, scene.params);
    last = min_distance_to_body(scene.cloth.positions, scene.colliders.body->bvh());
    lowest = std::min(lowest, last);
  }
  CHECK(lowest >= scene.colliders.margin - 1e-5);
  CHECK(last <= scene.colliders.margin + 0.02);
}

TEST_CASE("mirror symmetry") {
  auto scene = fixture::sphere_drape(16);
  scene.colliders.body.reset();
  scene.colliders.spheres.push_back({Vec3::Zero(), 0.5});
  for (int f = 0; f < 20; ++f) scene.cloth = step(std::move(scene.cloth), scene.colliders, scene.params);
  const int n = scene.cloth.grid_res;
  double worst = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Vec3 a = scene.cloth.positions[static_cast<std::size_t>(j * n + i)];
      const Vec3 b = scene.cloth.positions[static_cast<std::size_t>(j * n + (n - 1 - i))];
      worst = std::max(worst, (a - Vec3(-b[0], b[1], b[2])).norm());
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("determinism") {
  auto a = fixture::sphere_drape(12), b = fixture::sphere_drape(12);
  for (int f = 0; f < 10; ++f) {
    a.cloth = step(std::move(a.cloth), a.colliders, a.params);
    b.cloth = step(std::move(b.cloth), b.colliders, b.params);
  }
  CHECK(a.cloth.positions == b.cloth.positions);
  CHECK(a.cloth.velocities == b.cloth.velocities);
}

TEST_CASE("warm-up settles and reports telemetry") {
  auto scene = fixture::sphere_drape(20);
  std::vector<FrameTelemetry> log;
  const ClothGrid settled = warmup(scene.cloth, scene.colliders, scene.params, 24,
                                   [&](const FrameTelemetry& t) { log.push_back(t); });
  REQUIRE(log.size() == 24);
  CHECK(log.front().frame == -24);
  CHECK(log.back().frame == -1);
  double peak = 0;
  for (const auto& t : log) peak = std::max(peak, t.kinetic_energy);
  CHECK(log.back().kinetic_energy < 0.1 * peak);
  CHECK(log.back().kinetic_energy == doctest::Approx(settled.kinetic_energy()));

  const ClothGrid same = warmup(scene.cloth, scene.colliders, scene.params, 0);
  CHECK(same.positions == scene.cloth.positions);

  std::ostringstream line;
  write_telemetry_line(line, {3, 0.25, 1.5});
  CHECK(line.str() == "3\t0.25\t1.5\n");
}

TEST_CASE("non-finite state raises") {
  SimParams params;
  ClothGrid c = free_particles({Vec3(std::nan(""), 0, 0)}, {Vec3::Zero()});
  CHECK_THROWS_AS(step(c, ColliderSet{}, params), SimulationError);
  params.substeps = 0;
  CHECK_THROWS_AS(step(c, ColliderSet{}, params), InvalidInput);
}
