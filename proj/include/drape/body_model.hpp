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

#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "drape/geometry.hpp"

namespace drape {

/// Parametric articulated body (SMPL layout). Sizes are generic so that toy
/// templates with a handful of vertices and joints behave exactly like the
/// full 6890-vertex model.
struct BodyTemplate {
  Points rest_vertices;             // V
  Faces faces;                      // F
  Eigen::MatrixXd skin_weights;     // V×J
  Eigen::MatrixXd joint_regressor;  // J×V
  Eigen::MatrixXd shape_dirs;       // 3V×B, row 3v+c
  Eigen::MatrixXd pose_dirs;        // 3V×9(J−1), row 3v+c
  std::vector<int> parents;         // parents[0] == -1

  int num_vertices() const { return static_cast<int>(rest_vertices.size()); }
  int num_joints() const { return static_cast<int>(parents.size()); }
  int num_betas() const { return static_cast<int>(shape_dirs.cols()); }

  /// Throws InvalidInput naming the first violated invariant.
  void validate() const;
};

struct ShapeParams {
  std::vector<double> betas;
};

struct PoseParams {
  std::vector<Vec3> joint_rotations;  // axis-angle, one per joint
  Vec3 root_translation = Vec3::Zero();
};

struct SkinnedMesh {
  TriangleMesh mesh;
  Points joints;
};

struct PoseOptions {
  bool pose_blendshapes = true;
};

Mat3 rodrigues(const Vec3& axis_angle);

/// Wraps the rotation angle into [0, 2π) while keeping the axis. Returns the
/// input unchanged when it is already in range.
Vec3 normalize_axis_angle(const Vec3& axis_angle);

Points shape_blend(const BodyTemplate& body, const ShapeParams& shape);
Points regress_joints(const Points& rest_shape, const BodyTemplate& body);

SkinnedMesh pose_mesh(const BodyTemplate& body, const ShapeParams& shape, const PoseParams& pose,
                      const PoseOptions& options = {});

/// Forward-kinematics joint positions only (no skinning). Matches
/// pose_mesh(...).joints exactly.
Points pose_joints(const BodyTemplate& body, const ShapeParams& shape, const PoseParams& pose);

/// Archive directory: model.json + little-endian float32/uint32 binaries.
BodyTemplate load_body_template(const std::filesystem::path& dir);
void save_body_template(const BodyTemplate& body, const std::filesystem::path& dir);

}  // namespace drape
