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


#include <random>

#include <doctest.h>

#include "drape/render_composite.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace drape;

namespace {

CameraModel small_camera() {
  CameraModel cam;
  cam.width = 64;
  cam.height = 48;
  cam.fx = cam.fy = 60;
  cam.cx = 31.5;
  cam.cy = 23.5;
  return cam;
}

// Camera-depth of the ray through image point (u, v) against one triangle.
std::optional<double> ray_depth(const CameraModel& cam, double u, double v, const Vec3& a, const Vec3& b,
                                const Vec3& c) {
  const Vec3 dir = cam.rotation.transpose() * Vec3((u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0);
  return oracle::ray_triangle(cam.center(), dir, a, b, c);
}

enum class Cover { In, Out, Edge };

// Robust coverage: all four slightly offset rays agree.
Cover coverage(const CameraModel& cam, int x, int y, const Vec3& a, const Vec3& b, const Vec3& c) {
  int hits = 0;
  for (auto [du, dv] : {std::pair{1e-4, 1e-4}, {-1e-4, 1e-4}, {1e-4, -1e-4}, {-1e-4, -1e-4}})
    hits += ray_depth(cam, x + du, y + dv, a, b, c).has_value();
  return hits == 4 ? Cover::In : hits == 0 ? Cover::Out : Cover::Edge;
}

// Jittered planar grid facing the camera, spanning [lo, hi] in x and y at depth z.
TriangleMesh jittered_plane(std::mt19937_64& rng, int res, double lo, double hi, double z) {
  std::uniform_real_distribution<double> j(-0.3, 0.3);
  TriangleMesh m;
  m.faces = grid_faces(res);
  const double step = (hi - lo) / (res - 1);
  for (int r = 0; r < res; ++r)
    for (int c = 0; c < res; ++c) {
      const bool border = r == 0 || c == 0 || r == res - 1 || c == res - 1;
      const double dx = border ? 0 : j(rng) * step, dy = border ? 0 : j(rng) * step;
      m.vertices.emplace_back(lo + c * step + dx, lo + r * step + dy, z + (border ? 0 : j(rng) * 0.1));
    }
  return m;
}

FrameImage noise_image(std::mt19937_64& rng, int w, int h) {
  FrameImage img(w, h);
  for (auto& b : img.rgb) b = static_cast<std::uint8_t>(rng() & 0xff);
  return img;
}

}  // namespace

TEST_CASE("shared edges are drawn exactly once") {
  std::mt19937_64 rng(1);
  const CameraModel cam = small_camera();
  for (int trial = 0; trial < 20; ++trial) {
    const TriangleMesh plane = jittered_plane(rng, 7, -0.37, 0.41, 2.0);
    std::vector<int> visits(static_cast<std::size_t>(cam.width) * cam.height, 0);
    for (const auto& f : plane.faces)
      rasterize_triangle(cam, plane.vertices[f[0]], plane.vertices[f[1]], plane.vertices[f[2]],
                         [&](int x, int y, double) { ++visits[static_cast<std::size_t>(y) * cam.width + x]; });
    // Outer square projects to u, v in 60·[−0.37, 0.41]/2 + center.
    for (int y = 0; y < cam.height; ++y)
      for (int x = 0; x < cam.width; ++x) {
        const double u = (x - cam.cx) / 30.0, v = (y - cam.cy) / 30.0;
        const bool in = u > -0.37 && u < 0.41 && v > -0.37 && v < 0.41;
        CHECK(visits[static_cast<std::size_t>(y) * cam.width + x] == (in ? 1 : 0));
      }
  }
}

TEST_CASE("depth and coverage match ray casting") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.5, 1.5), z(-0.5, 4);
  const CameraModel base = small_camera();
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    CameraModel cam = fixture::camera_looking_at(rng, Vec3::Zero(), 3);
    cam.width = base.width;
    cam.height = base.height;
    cam.fx = cam.fy = base.fx;
    cam.cx = base.cx;
    cam.cy = base.cy;
    // Triangles in camera space, some crossing the near plane.
    const Vec3 a = cam.to_world(Vec3(u(rng), u(rng), z(rng)));
    const Vec3 b = cam.to_world(Vec3(u(rng), u(rng), z(rng)));
    const Vec3 c = cam.to_world(Vec3(u(rng), u(rng), z(rng)));
    const TriangleMesh mesh{{a, b, c}, {{0, 1, 2}}};
    const DepthMap map = rasterize_depth(std::span(&mesh, 1), cam);
    for (int y = 0; y < cam.height; ++y)
      for (int x = 0; x < cam.width; ++x) {
        const Cover cov = coverage(cam, x, y, a, b, c);
        const float d = map.at(x, y);
        if (cov == Cover::Edge) continue;
        const auto t = ray_depth(cam, x, y, a, b, c);
        // Hits closer than the clip plane are clipped away.
        const bool visible = cov == Cover::In && t && *t >= kNearClip * 1.001;
        if (cov == Cover::In && t && *t < kNearClip * 1.001 && *t > kNearClip * 0.999) continue;
        CHECK(std::isfinite(d) == visible);
        if (visible && std::isfinite(d)) {
          CHECK(std::abs(d - *t) <= 1e-5 * *t + 1e-6);
          ++checked;
        }
      }
  }
  CHECK(checked > 10000);
}

TEST_CASE("compositing leaves uncovered pixels byte-identical") {
  std::mt19937_64 rng(3);
  const CameraModel cam = small_camera();
  const FrameImage original = noise_image(rng, cam.width, cam.height);
  const Vec3 a(-0.5, -0.3, 2), b(0.6, -0.1, 2.5), c(0.0, 0.5, 1.8);
  const TriangleMesh blanket{{a, b, c}, {{0, 1, 2}}};
  // Holdout: a sphere partially in front of the blanket.
  const TriangleMesh ball = fixture::uv_sphere(Vec3(0.1, 0, 1.6), 0.2, 12, 24);
  const DepthMap holdout = rasterize_depth(std::span(&ball, 1), cam);
  const FrameImage out = render_blanket(blanket, {Vec3(0.2, 0.6, 0.9)}, {}, cam, holdout, original);
  int changed = 0, kept = 0;
  for (int y = 0; y < cam.height; ++y)
    for (int x = 0; x < cam.width; ++x) {
      const Cover cov = coverage(cam, x, y, a, b, c);
      const bool same = std::equal(out.pixel(x, y), out.pixel(x, y) + 3, original.pixel(x, y));
      if (cov == Cover::Out || std::isfinite(holdout.at(x, y))) {
        CHECK(same);
        ++kept;
      } else if (cov == Cover::In) {
        ++changed;
      }
    }
  CHECK(changed > 100);
  CHECK(kept > 100);
}

TEST_CASE("a fully hidden blanket changes nothing") {
  std::mt19937_64 rng(4);
  const CameraModel cam = small_camera();
  const FrameImage original = noise_image(rng, cam.width, cam.height);
  const TriangleMesh plane = jittered_plane(rng, 5, -2, 2, 3);
  DepthMap holdout(cam.width, cam.height);
  std::fill(holdout.depth.begin(), holdout.depth.end(), 1.0f);
  CHECK(render_blanket(plane, {}, {}, cam, holdout, original) == original);
  // Bias lets fragments just behind the holdout through.
  RenderOptions opts;
  opts.holdout_bias = 2.5;
  CHECK_FALSE(render_blanket(plane, {}, {}, cam, holdout, original, opts) == original);
}

TEST_CASE("flat shading of a plane") {
  const CameraModel cam = small_camera();
  const FrameImage original(cam.width, cam.height, 7);
  const DepthMap empty(cam.width, cam.height);
  TriangleMesh plane{{Vec3(-5, -5, 2), Vec3(5, -5, 2), Vec3(-5, 5, 2), Vec3(5, 5, 2)}, {{0, 1, 2}, {1, 3, 2}}};
  const BlanketMaterial mat{Vec3(0.8, 0.4, 0.1)};

  auto expect_uniform = [&](const FrameImage& img, double shade) {
    for (int y = 0; y < cam.height; ++y)
      for (int x = 0; x < cam.width; ++x)
        for (int k = 0; k < 3; ++k) CHECK(img.pixel(x, y)[k] == encode_srgb8(mat.albedo[k] * shade));
  };
  // Light travelling along the view direction hits the plane head on.
  expect_uniform(render_blanket(plane, mat, {Vec3(0, 0, 1), 1.0}, cam, empty, original), 1.0);
  const double angle = 1.0;
  expect_uniform(render_blanket(plane, mat, {Vec3(std::sin(angle), 0, std::cos(angle)), 1.0}, cam, empty, original),
                 std::cos(angle));
  // Grazing light falls to the ambient floor.
  expect_uniform(render_blanket(plane, mat, {Vec3(1, 0, 0.01), 1.0}, cam, empty, original), 0.15);
  // The winding above faces away from the camera: culled when one-sided.
  BlanketMaterial one_sided = mat;
  one_sided.two_sided = false;
  CHECK(render_blanket(plane, one_sided, {Vec3(0, 0, 1), 1.0}, cam, empty, original) == original);
  std::swap(plane.faces[0][1], plane.faces[0][2]);
  std::swap(plane.faces[1][1], plane.faces[1][2]);
  expect_uniform(render_blanket(plane, one_sided, {Vec3(0, 0, 1), 1.0}, cam, empty, original), 1.0);
}

TEST_CASE("supersampling") {
  const CameraModel cam = small_camera();
  const CameraModel big = scaled_camera(cam, 2);
  CHECK(big.width == 128);
  CHECK(big.height == 96);
  // A point at original pixel (u, v) lands at (2u + 0.5, 2v + 0.5).
  const Vec3 p(0.13, -0.07, 1.7);
  const auto a = project(cam, p), b = project(big, p);
  CHECK(b->u == doctest::Approx(2 * a->u + 0.5));
  CHECK(b->v == doctest::Approx(2 * a->v + 0.5));

  const FrameImage original(cam.width, cam.height, 0);
  RenderOptions ss;
  ss.supersample = true;
  const TriangleMesh plane{{Vec3(-5, -5, 2), Vec3(5, -5, 2), Vec3(-5, 5, 2), Vec3(5, 5, 2)}, {{0, 1, 2}, {1, 3, 2}}};
  CHECK_THROWS_AS(render_blanket(plane, {}, {}, cam, DepthMap(cam.width, cam.height), original, ss), InvalidInput);
  const FrameImage full = render_blanket(plane, {}, {}, cam, DepthMap(big.width, big.height), original, ss);
  CHECK(full == render_blanket(plane, {}, {}, cam, DepthMap(cam.width, cam.height), original));

  // A vertical edge through pixel centers' quarter offsets gives 50% coverage.
  const double u_edge = (20 - cam.cx) / cam.fx * 2;
  const TriangleMesh half{{Vec3(-5, -5, 2), Vec3(u_edge, -5, 2), Vec3(-5, 5, 2), Vec3(u_edge, 5, 2)},
                          {{0, 1, 2}, {1, 3, 2}}};
  const FrameImage edge = render_blanket(half, {Vec3(1, 1, 1)}, {}, cam, DepthMap(big.width, big.height), original, ss);
  CHECK(edge.pixel(19, 10)[0] == 255);
  CHECK(edge.pixel(20, 10)[0] == encode_srgb8(0.5));
  CHECK(edge.pixel(21, 10)[0] == 0);
}

TEST_CASE("subdivision equals tensor-product spline refinement") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int res : {2, 3, 5, 8}) {
    QuadGrid g{res, {}};
    for (int k = 0; k < res * res; ++k) g.positions.emplace_back(u(rng), u(rng), u(rng));
    const QuadGrid once = subdivide_for_render(g, 1);
    CHECK(once.res == 2 * res - 1);
    const auto want = oracle::refine_grid(g.positions, res);
    double worst = 0;
    for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, (once.positions[i] - want[i]).norm());
    CHECK(worst < 1e-12);
    const QuadGrid twice = subdivide_for_render(g, 2);
    CHECK(twice.res == 2 * (2 * res - 1) - 1);
    const auto want2 = oracle::refine_grid(want, 2 * res - 1);
    worst = 0;
    for (std::size_t i = 0; i < want2.size(); ++i) worst = std::max(worst, (twice.positions[i] - want2[i]).norm());
    CHECK(worst < 1e-12);
    CHECK(subdivide_for_render(g, 0).positions == g.positions);
    CHECK(once.triangulate().faces.size() == static_cast<std::size_t>(2 * (once.res - 1) * (once.res - 1)));
  }
  CHECK_THROWS_AS(subdivide_for_render(QuadGrid{3, {}}, 1), InvalidInput);
}

TEST_CASE("blanket colors are uniform and reproducible") {
  const int n = 20000;
  Vec3 mean = Vec3::Zero(), sq = Vec3::Zero();
  double cross = 0;
  for (int k = 0; k < n; ++k) {
    const Vec3 c = sample_blanket_color(42, static_cast<std::uint64_t>(k)).albedo;
    CHECK(((c.array() >= 0).all() && (c.array() < 1).all()));
    mean += c;
    sq += c.cwiseProduct(c);
    cross += (c[0] - 0.5) * (c[1] - 0.5);
  }
  mean /= n;
  sq /= n;
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(mean[k] - 0.5) < 0.01);
    CHECK(std::abs(sq[k] - mean[k] * mean[k] - 1.0 / 12) < 0.005);
  }
  CHECK(std::abs(cross / n) < 0.005);
  CHECK(sample_blanket_color(7, 3).albedo == sample_blanket_color(7, 3).albedo);
  CHECK(sample_blanket_color(7, 3).albedo != sample_blanket_color(8, 3).albedo);
  CHECK(sample_blanket_color(7, 3).albedo != sample_blanket_color(7, 4).albedo);
}

TEST_CASE("sRGB encoding") {
  CHECK(encode_srgb8(0.0) == 0);
  CHECK(encode_srgb8(1.0) == 255);
  CHECK(encode_srgb8(2.0) == 255);
  CHECK(encode_srgb8(-1.0) == 0);
  CHECK(encode_srgb8(0.5) == 188);
  CHECK(encode_srgb8(0.18) == 118);
  CHECK(linear_to_srgb(0.0031308) == doctest::Approx(0.04045).epsilon(1e-3));
  double prev = -1;
  for (int k = 0; k <= 1000; ++k) {
    const double s = linear_to_srgb(k / 1000.0);
    CHECK(s > prev);
    prev = s;
  }
}
