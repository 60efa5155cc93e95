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


#include "drape/toy_data.hpp"

#include <cmath>
#include <numbers>

#include "drape/image_io.hpp"

namespace drape {

namespace {

constexpr double kHalfHeight = 0.9, kHalfWidth = 0.22, kHalfDepth = 0.14;

}  // namespace

BodyTemplate make_toy_body(int rings, int segments) {
  if (rings < 9 || rings % 2 == 0 || segments < 3) throw InvalidInput("toy body needs an odd ring count >= 9");
  BodyTemplate body;
  const auto S = static_cast<std::uint32_t>(segments);
  const int equator = rings / 2;

  body.rest_vertices.emplace_back(0, kHalfHeight, 0);
  for (int k = 0; k < rings; ++k) {
    const double theta = std::numbers::pi * (k + 1) / (rings + 1);
    const double y = k == equator ? 0.0 : kHalfHeight * std::cos(theta);
    for (int s = 0; s < segments; ++s) {
      const double phi = 2 * std::numbers::pi * s / segments;
      body.rest_vertices.emplace_back(kHalfWidth * std::sin(theta) * std::cos(phi), y,
                                      kHalfDepth * std::sin(theta) * std::sin(phi));
    }
  }
  body.rest_vertices.emplace_back(0, -kHalfHeight, 0);
  const auto V = static_cast<std::uint32_t>(body.rest_vertices.size());
  auto ring = [&](int k, std::uint32_t s) { return 1 + static_cast<std::uint32_t>(k) * S + s % S; };

  for (std::uint32_t s = 0; s < S; ++s) {
    body.faces.push_back({0, ring(0, s), ring(0, s + 1)});
    for (int k = 0; k + 1 < rings; ++k) {
      body.faces.push_back({ring(k, s), ring(k + 1, s), ring(k + 1, s + 1)});
      body.faces.push_back({ring(k, s), ring(k + 1, s + 1), ring(k, s + 1)});
    }
    body.faces.push_back({V - 1, ring(rings - 1, s + 1), ring(rings - 1, s)});
  }
  // Convex and centered: orient every face away from the origin.
  for (auto& f : body.faces) {
    const Vec3& a = body.rest_vertices[f[0]];
    const Vec3 n = (body.rest_vertices[f[1]] - a).cross(body.rest_vertices[f[2]] - a);
    if (n.dot(a + body.rest_vertices[f[1]] + body.rest_vertices[f[2]]) < 0) std::swap(f[1], f[2]);
  }

  // pelvis, chest, head, legs
  body.parents = {-1, 0, 1, 0};
  const int joint_ring[4] = {equator, equator - 2, 1, equator + 3};
  const int J = 4;
  body.joint_regressor = Eigen::MatrixXd::Zero(J, V);
  for (int j = 0; j < J; ++j)
    for (std::uint32_t s = 0; s < S; ++s) body.joint_regressor(j, ring(joint_ring[j], s)) = 1.0 / segments;

  // Linear blend along the body axis between neighbouring joints, ordered legs, pelvis, chest, head.
  const int chain[4] = {3, 0, 1, 2};
  double height[4];
  for (int c = 0; c < 4; ++c) {
    const double theta = std::numbers::pi * (joint_ring[chain[c]] + 1) / (rings + 1);
    height[c] = joint_ring[chain[c]] == equator ? 0.0 : kHalfHeight * std::cos(theta);
  }
  body.skin_weights = Eigen::MatrixXd::Zero(V, J);
  for (std::uint32_t v = 0; v < V; ++v) {
    const double y = body.rest_vertices[v].y();
    if (y <= height[0]) {
      body.skin_weights(v, chain[0]) = 1;
    } else if (y >= height[3]) {
      body.skin_weights(v, chain[3]) = 1;
    } else {
      int c = 0;
      while (y > height[c + 1]) ++c;
      const double t = (y - height[c]) / (height[c + 1] - height[c]);
      body.skin_weights(v, chain[c]) = 1 - t;
      body.skin_weights(v, chain[c + 1]) = t;
    }
  }

  body.shape_dirs = Eigen::MatrixXd::Zero(3 * V, 2);
  body.pose_dirs = Eigen::MatrixXd::Zero(3 * V, 9 * (J - 1));
  for (std::uint32_t v = 0; v < V; ++v) {
    const Vec3& p = body.rest_vertices[v];
    body.shape_dirs(3 * v + 1, 0) = 0.05 * p.y();  // height
    body.shape_dirs(3 * v + 0, 1) = 0.1 * p.x();   // girth
    body.shape_dirs(3 * v + 2, 1) = 0.1 * p.z();
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < 9 * (J - 1); ++k)
        body.pose_dirs(3 * v + c, k) = 1e-3 * std::sin(0.37 * v + 1.3 * c + 0.71 * k);
  }
  body.validate();
  return body;
}

SequenceInput make_toy_sequence(const ToySequenceOptions& options) {
  if (options.frames < 1 || options.subjects < 1) throw InvalidInput("toy sequence needs frames and subjects");
  SequenceInput seq;
  seq.id = options.id;
  seq.frame_rate = 30;
  seq.split = options.split;
  seq.intrinsics.width = options.width;
  seq.intrinsics.height = options.height;
  seq.intrinsics.fx = seq.intrinsics.fy = 0.8 * options.width;
  seq.intrinsics.cx = 0.5 * (options.width - 1);
  seq.intrinsics.cy = 0.5 * (options.height - 1);
  seq.body_model = "body_model";

  // Camera 3 m in front of the subjects looking at them, image up = +y,
  // drifting slowly around the vertical axis.
  const Mat3 flip = Vec3(1, -1, -1).asDiagonal();
  for (int f = 0; f < options.frames; ++f) {
    const Mat3 R = flip * Eigen::AngleAxisd(0.002 * f, Vec3::UnitY()).toRotationMatrix();
    seq.camera_rotations.push_back(R);
    seq.camera_translations.push_back(-R * Vec3(0, 0, 3));
  }
  for (int k = 0; k < options.subjects; ++k) {
    SubjectTrack track;
    track.shape.betas = {0.3 * k, -0.2 * k};
    const double x0 = (k - 0.5 * (options.subjects - 1)) * 0.9;
    for (int f = 0; f < options.frames; ++f) {
      PoseParams p;
      p.joint_rotations = {Vec3(0, 0.05 * std::sin(0.05 * f + k), 0), Vec3(0.15 * std::sin(0.1 * f + k), 0, 0),
                           Vec3(0, 0.1 * std::sin(0.08 * f), 0), Vec3(0, 0, 0.05 * std::sin(0.06 * f + 2 * k))};
      p.root_translation = Vec3(x0 + 0.01 * std::sin(0.07 * f), 0.005 * std::sin(0.03 * f), 0);
      track.poses.push_back(std::move(p));
    }
    seq.subjects.push_back(std::move(track));
  }
  seq.validate();
  return seq;
}

FrameImage toy_background(int width, int height, int frame) {
  FrameImage img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      std::uint8_t* p = img.pixel(x, y);
      p[0] = static_cast<std::uint8_t>((3 * x + frame) % 256);
      p[1] = static_cast<std::uint8_t>((5 * y + 2 * frame) % 256);
      p[2] = static_cast<std::uint8_t>((x * y + 7 * frame) % 256);
    }
  }
  return img;
}

void write_toy_sequence(const std::filesystem::path& dir, const ToySequenceOptions& options) {
  SequenceInput seq = make_toy_sequence(options);
  seq.root = dir;
  write_sequence(seq, dir);
  save_body_template(make_toy_body(), dir / *seq.body_model);
  std::filesystem::create_directories(dir / seq.frames.directory);
  for (int f = 0; f < options.frames; ++f)
    write_image(seq.frame_path(f), toy_background(options.width, options.height, f), ImageEncoder::Png);
}

}  // namespace drape
