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
#include <filesystem>
#include <map>
#include <set>
#include <numbers>
#include <random>

#include "drape/body_model.hpp"
#include "drape/cloth_sim.hpp"
#include "drape/geometry.hpp"
#include "drape/pipeline.hpp"
#include "drape/scene_setup.hpp"
#include "oracles.hpp"

namespace fixture {

using drape::CameraModel;
using drape::Vec3;

/// Random pinhole camera looking at `target` from `distance` meters.
inline CameraModel camera_looking_at(std::mt19937_64& rng, const Vec3& target, double distance) {
  std::uniform_real_distribution<double> f(300, 1500), jitter(-20, 20);
  CameraModel cam;
  cam.width = 640;
  cam.height = 480;
  cam.fx = f(rng);
  cam.fy = cam.fx * (1 + 0.01 * jitter(rng) / 20);
  cam.cx = 319.5 + jitter(rng);
  cam.cy = 239.5 + jitter(rng);
  cam.rotation = oracle::random_rotation(rng);
  const Vec3 center = target - cam.rotation.transpose() * Vec3(0, 0, distance);
  cam.translation = -cam.rotation * center;
  return cam;
}

/// UV sphere, poles as fans: 2·segments·(rings − 1) triangles.
inline drape::TriangleMesh uv_sphere(const Vec3& center, double radius, int rings, int segments) {
  drape::TriangleMesh m;
  m.vertices.push_back(center + Vec3(0, 0, radius));
  for (int k = 1; k < rings; ++k) {
    const double theta = std::numbers::pi * k / rings;
    for (int s = 0; s < segments; ++s) {
      const double phi = 2 * std::numbers::pi * s / segments;
      m.vertices.push_back(center + radius * Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                                                  std::cos(theta)));
    }
  }
  m.vertices.push_back(center - Vec3(0, 0, radius));
  const auto S = static_cast<std::uint32_t>(segments);
  const auto last = static_cast<std::uint32_t>(m.vertices.size() - 1);
  auto ring = [&](int k, std::uint32_t s) { return 1 + static_cast<std::uint32_t>(k - 1) * S + s % S; };
  for (std::uint32_t s = 0; s < S; ++s) {
    m.faces.push_back({0, ring(1, s), ring(1, s + 1)});
    for (int k = 1; k + 1 < rings; ++k) {
      m.faces.push_back({ring(k, s), ring(k + 1, s), ring(k + 1, s + 1)});
      m.faces.push_back({ring(k, s), ring(k + 1, s + 1), ring(k, s + 1)});
    }
    m.faces.push_back({last, ring(rings - 1, s + 1), ring(rings - 1, s)});
  }
  return m;
}

/// 500 triangles: a 480-triangle sphere with jittered vertices plus 20
/// duplicated faces scattered through the list, so exact distance ties occur.
inline drape::TriangleMesh tie_mesh(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  drape::TriangleMesh m = uv_sphere(Vec3(0.1, -0.2, 0.3), 0.5, 11, 24);
  std::uniform_real_distribution<double> j(-0.01, 0.01);
  for (auto& v : m.vertices) v += Vec3(j(rng), j(rng), j(rng));
  std::uniform_int_distribution<std::size_t> pick(0, m.faces.size() - 1);
  for (int k = 0; k < 20; ++k) {
    const auto src = m.faces[pick(rng)];
    const auto at = static_cast<std::ptrdiff_t>(pick(rng));
    m.faces.insert(m.faces.begin() + at, src);
  }
  return m;
}

/// Cloth held flat above a tessellated sphere (radius 0.5 at the origin),
/// falling along +z onto it. grid_res a multiple of 4 keeps it mirror-symmetric.
struct DrapeScene {
  drape::ClothGrid cloth;
  drape::ColliderSet colliders;
  drape::SimParams params;
};

inline DrapeScene sphere_drape(int grid_res) {
  DrapeScene s;
  drape::BlanketPlacement place;
  place.center = Vec3(0, 0, -0.6);
  place.u_axis = Vec3::UnitX();
  place.v_axis = Vec3::UnitY();
  place.normal = -Vec3::UnitZ();
  place.width = place.length = 1.6;
  s.cloth = drape::build_cloth(place, grid_res, 0.3);
  s.colliders.body.emplace(uv_sphere(Vec3::Zero(), 0.5, 24, 48));
  s.colliders.margin = 0.0005;
  s.params.gravity_direction = Vec3::UnitZ();
  return s;
}

// Two joints (shoulder at the origin, elbow at x = 1) and three vertices.
inline drape::BodyTemplate toy_chain() {
  drape::BodyTemplate b;
  b.rest_vertices = {Vec3(0.5, 0, 0), Vec3(1.5, 0, 0), Vec3(1, 0.2, 0)};
  b.faces = {{0, 1, 2}};
  b.parents = {-1, 0};
  b.skin_weights.resize(3, 2);
  b.skin_weights << 1, 0, 0, 1, 0.5, 0.5;
  b.joint_regressor.resize(2, 3);
  b.joint_regressor << 3, -1, 0, 0.5, 0.5, 0;
  b.shape_dirs = Eigen::MatrixXd::Zero(9, 1);
  b.shape_dirs(4, 0) = 0.1;
  return b;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("drape_" + tag + "_" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Segment simulator driven by a script of absolute frame outcomes. Every
/// call is logged.
class ScriptedSimulator : public drape::SegmentSimulator {
 public:
  std::map<int, drape::FrameOutcome> script;
  std::set<int> throw_at;  // advance() raises SimulationError here

  std::vector<int> begins, emitted;
  std::vector<drape::SegmentRecord> ended;

  void begin(int start) override {
    begins.push_back(start);
    current_ = start;
  }
  drape::FrameOutcome advance(int frame) override {
    if (frame < current_) throw std::logic_error("advance went backwards");
    current_ = frame;
    if (throw_at.count(frame)) throw drape::SimulationError("scripted failure");
    auto it = script.find(frame);
    return it == script.end() ? drape::FrameOutcome::Ok : it->second;
  }
  void emit(int frame) override { emitted.push_back(frame); }
  void end(drape::SegmentRecord& rec) override { ended.push_back(rec); }

 private:
  int current_ = 0;
};

}  // namespace fixture
