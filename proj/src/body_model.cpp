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


#include "drape/body_model.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "drape/binary_io.hpp"

namespace drape {

void BodyTemplate::validate() const {
  const auto V = num_vertices();
  const auto J = num_joints();
  if (V == 0) throw InvalidInput("body template has no vertices");
  if (J == 0) throw InvalidInput("body template has no joints");
  if (parents[0] != -1) throw InvalidInput("parents[0] must be the root sentinel -1");
  for (int j = 1; j < J; ++j) {
    if (parents[j] < 0 || parents[j] >= j)
      throw InvalidInput(fmt::format("parents[{}] = {} is not a topologically earlier joint", j, parents[j]));
  }
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (auto idx : faces[f]) {
      if (idx >= static_cast<std::uint32_t>(V))
        throw InvalidInput(fmt::format("face {} references vertex {} (V = {})", f, idx, V));
    }
  }
  if (skin_weights.rows() != V || skin_weights.cols() != J)
    throw InvalidInput(fmt::format("skin_weights is {}x{}, expected {}x{}", skin_weights.rows(),
                                   skin_weights.cols(), V, J));
  for (int v = 0; v < V; ++v) {
    if ((skin_weights.row(v).array() < 0.0).any())
      throw InvalidInput(fmt::format("skin_weights row {} has a negative weight", v));
    const double sum = skin_weights.row(v).sum();
    if (std::abs(sum - 1.0) > 1e-6)
      throw InvalidInput(fmt::format("skin_weights row {} sums to {}", v, sum));
  }
  if (joint_regressor.rows() != J || joint_regressor.cols() != V)
    throw InvalidInput(fmt::format("joint_regressor is {}x{}, expected {}x{}", joint_regressor.rows(),
                                   joint_regressor.cols(), J, V));
  if (shape_dirs.rows() != 3 * V)
    throw InvalidInput(fmt::format("shape_dirs has {} rows, expected {}", shape_dirs.rows(), 3 * V));
  if (pose_dirs.size() != 0 && (pose_dirs.rows() != 3 * V || pose_dirs.cols() != 9 * (J - 1)))
    throw InvalidInput(fmt::format("pose_dirs is {}x{}, expected {}x{}", pose_dirs.rows(),
                                   pose_dirs.cols(), 3 * V, 9 * (J - 1)));
}

Mat3 rodrigues(const Vec3& axis_angle) {
  const double theta = axis_angle.norm();
  Mat3 K;
  K << 0, -axis_angle.z(), axis_angle.y(),  //
      axis_angle.z(), 0, -axis_angle.x(),   //
      -axis_angle.y(), axis_angle.x(), 0;
  if (theta < 1e-8) {
    // Second-order Taylor expansion; exact identity at zero.
    return Mat3::Identity() + K + 0.5 * K * K;
  }
  const Mat3 k = K / theta;
  return Mat3::Identity() + std::sin(theta) * k + (1.0 - std::cos(theta)) * k * k;
}

Vec3 normalize_axis_angle(const Vec3& axis_angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double theta = axis_angle.norm();
  if (theta < two_pi) return axis_angle;
  return axis_angle / theta * std::fmod(theta, two_pi);
}

Points shape_blend(const BodyTemplate& body, const ShapeParams& shape) {
  if (static_cast<Eigen::Index>(shape.betas.size()) != body.shape_dirs.cols())
    throw InvalidInput(fmt::format("got {} betas, body model has {} shape directions",
                                   shape.betas.size(), body.shape_dirs.cols()));
  for (double b : shape.betas) {
    if (!std::isfinite(b)) throw InvalidInput("non-finite shape coefficient");
    if (std::abs(b) > 5.0) spdlog::warn("shape coefficient {} is outside the usual range", b);
  }
  Points out = body.rest_vertices;
  if (!shape.betas.empty()) {
    const Eigen::Map<const Eigen::VectorXd> betas(shape.betas.data(),
                                                  static_cast<Eigen::Index>(shape.betas.size()));
    flatten(out) += body.shape_dirs * betas;
  }
  return out;
}

Points regress_joints(const Points& rest_shape, const BodyTemplate& body) {
  const auto J = body.num_joints();
  const auto V = static_cast<Eigen::Index>(rest_shape.size());
  if (body.joint_regressor.cols() != V)
    throw InvalidInput(fmt::format("joint regressor expects {} vertices, got {}",
                                   body.joint_regressor.cols(), V));
  if (V == 0) return Points(J, Vec3::Zero());
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>> verts(
      rest_shape.front().data(), V, 3);
  const Eigen::Matrix<double, Eigen::Dynamic, 3> joints = body.joint_regressor * verts;
  Points out(J);
  for (int j = 0; j < J; ++j) out[j] = joints.row(j).transpose();
  return out;
}

namespace {

struct Kinematics {
  std::vector<Mat3> local_rotations;
  std::vector<Eigen::Isometry3d> global;  // joint frames in the body frame
  Points rest_joints;
  Points shaped;
};

void check_pose(const BodyTemplate& body, const PoseParams& pose) {
  if (static_cast<int>(pose.joint_rotations.size()) != body.num_joints())
    throw InvalidInput(fmt::format("pose has {} joint rotations, body model has {} joints",
                                   pose.joint_rotations.size(), body.num_joints()));
  for (const auto& r : pose.joint_rotations)
    if (!r.allFinite()) throw InvalidInput("non-finite joint rotation");
  if (!pose.root_translation.allFinite()) throw InvalidInput("non-finite root translation");
}

Kinematics forward_kinematics(const BodyTemplate& body, const ShapeParams& shape,
                              const PoseParams& pose) {
  check_pose(body, pose);
  Kinematics k;
  k.shaped = shape_blend(body, shape);
  k.rest_joints = regress_joints(k.shaped, body);
  const int J = body.num_joints();
  k.local_rotations.resize(J);
  k.global.resize(J);
  for (int j = 0; j < J; ++j) {
    k.local_rotations[j] = rodrigues(pose.joint_rotations[j]);
    Eigen::Isometry3d local = Eigen::Isometry3d::Identity();
    local.linear() = k.local_rotations[j];
    const int p = body.parents[j];
    local.translation() = p < 0 ? k.rest_joints[j] : Vec3(k.rest_joints[j] - k.rest_joints[p]);
    k.global[j] = p < 0 ? local : k.global[p] * local;
  }
  return k;
}

}  // namespace

Points pose_joints(const BodyTemplate& body, const ShapeParams& shape, const PoseParams& pose) {
  const auto k = forward_kinematics(body, shape, pose);
  Points out(k.global.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = k.global[j].translation() + pose.root_translation;
  return out;
}

SkinnedMesh pose_mesh(const BodyTemplate& body, const ShapeParams& shape, const PoseParams& pose,
                      const PoseOptions& options) {
  auto k = forward_kinematics(body, shape, pose);
  const int J = body.num_joints();
  const int V = body.num_vertices();

  Points& posed = k.shaped;
  if (options.pose_blendshapes && body.pose_dirs.size() != 0 && J > 1) {
    Eigen::VectorXd feature(9 * (J - 1));
    for (int j = 1; j < J; ++j) {
      const Mat3 d = k.local_rotations[j] - Mat3::Identity();
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) feature[9 * (j - 1) + 3 * r + c] = d(r, c);
    }
    flatten(posed) += body.pose_dirs * feature;
  }

  // Skinning transforms map rest-pose positions to posed positions.
  std::vector<Eigen::Matrix<double, 3, 4>> skin(J);
  for (int j = 0; j < J; ++j) {
    const Mat3 R = k.global[j].linear();
    skin[j].leftCols<3>() = R;
    skin[j].col(3) = k.global[j].translation() - R * k.rest_joints[j];
  }

  SkinnedMesh out;
  out.mesh.faces = body.faces;
  out.mesh.vertices.resize(V);
  for (int v = 0; v < V; ++v) {
    Eigen::Matrix<double, 3, 4> blend = Eigen::Matrix<double, 3, 4>::Zero();
    for (int j = 0; j < J; ++j) {
      const double w = body.skin_weights(v, j);
      if (w != 0.0) blend += w * skin[j];
    }
    out.mesh.vertices[v] = blend.leftCols<3>() * posed[v] + blend.col(3) + pose.root_translation;
  }
  out.joints.resize(J);
  for (int j = 0; j < J; ++j) out.joints[j] = k.global[j].translation() + pose.root_translation;

  if (!all_finite(out.mesh.vertices)) throw InvalidInput("posed body mesh has non-finite vertices");
  const double diag = bounds(out.mesh.vertices).extent().norm();
  if (diag >= 5.0) spdlog::warn("posed body bounding box diagonal is {:.2f} m", diag);
  return out;
}

// ---------------------------------------------------------------------------
// Archive I/O

namespace {

Eigen::MatrixXd to_matrix(const std::vector<float>& data, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
  return m;
}

std::vector<float> from_matrix(const Eigen::MatrixXd& m) {
  std::vector<float> out(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out[static_cast<std::size_t>(r * m.cols() + c)] = static_cast<float>(m(r, c));
  return out;
}

}  // namespace

BodyTemplate load_body_template(const std::filesystem::path& dir) {
  std::ifstream in(dir / "model.json");
  if (!in) throw IngestError(fmt::format("cannot open {}", (dir / "model.json").string()));
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(fmt::format("{}: {}", (dir / "model.json").string(), e.what()));
  }
  if (meta.value("endianness", "little") != "little")
    throw IngestError("body model archive must be little-endian");

  BodyTemplate body;
  std::size_t V = 0, F = 0, J = 0, B = 0;
  try {
    V = meta.at("num_vertices").get<std::size_t>();
    F = meta.at("num_faces").get<std::size_t>();
    J = meta.at("num_joints").get<std::size_t>();
    B = meta.at("num_betas").get<std::size_t>();
    body.parents = meta.at("parents").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(fmt::format("{}: {}", (dir / "model.json").string(), e.what()));
  }
  if (body.parents.size() != J)
    throw IngestError(fmt::format("model.json: {} parents for {} joints", body.parents.size(), J));

  const auto rest = binio::read_f32(dir / "rest_vertices.bin", V * 3);
  body.rest_vertices.resize(V);
  for (std::size_t v = 0; v < V; ++v) body.rest_vertices[v] = Vec3(rest[3 * v], rest[3 * v + 1], rest[3 * v + 2]);

  const auto faces = binio::read_u32(dir / "faces.bin", F * 3);
  body.faces.resize(F);
  for (std::size_t f = 0; f < F; ++f) body.faces[f] = {faces[3 * f], faces[3 * f + 1], faces[3 * f + 2]};

  const auto Vi = static_cast<Eigen::Index>(V);
  const auto Ji = static_cast<Eigen::Index>(J);
  body.skin_weights = to_matrix(binio::read_f32(dir / "skin_weights.bin", V * J), Vi, Ji);
  body.joint_regressor = to_matrix(binio::read_f32(dir / "joint_regressor.bin", J * V), Ji, Vi);
  body.shape_dirs = to_matrix(binio::read_f32(dir / "shape_dirs.bin", V * 3 * B), 3 * Vi,
                              static_cast<Eigen::Index>(B));
  const std::size_t P = J > 0 ? 9 * (J - 1) : 0;
  body.pose_dirs = to_matrix(binio::read_f32(dir / "pose_dirs.bin", V * 3 * P), 3 * Vi,
                             static_cast<Eigen::Index>(P));

  // float32 storage perturbs weight sums slightly; renormalize rows.
  for (Eigen::Index v = 0; v < Vi; ++v) {
    const double s = body.skin_weights.row(v).sum();
    if (s > 0) body.skin_weights.row(v) /= s;
  }
  try {
    body.validate();
  } catch (const InvalidInput& e) {
    throw IngestError(fmt::format("{}: {}", dir.string(), e.what()));
  }
  return body;
}

void save_body_template(const BodyTemplate& body, const std::filesystem::path& dir) {
  body.validate();
  std::filesystem::create_directories(dir);
  nlohmann::json meta = {
      {"format", "drape-body-model"},
      {"version", 1},
      {"endianness", "little"},
      {"num_vertices", body.num_vertices()},
      {"num_faces", body.faces.size()},
      {"num_joints", body.num_joints()},
      {"num_betas", body.num_betas()},
      {"parents", body.parents},
  };
  std::ofstream(dir / "model.json") << meta.dump(2) << '\n';

  std::vector<float> rest;
  rest.reserve(body.rest_vertices.size() * 3);
  for (const auto& v : body.rest_vertices)
    for (int c = 0; c < 3; ++c) rest.push_back(static_cast<float>(v[c]));
  binio::write_f32(dir / "rest_vertices.bin", rest);

  std::vector<std::uint32_t> faces;
  faces.reserve(body.faces.size() * 3);
  for (const auto& f : body.faces) faces.insert(faces.end(), f.begin(), f.end());
  binio::write_u32(dir / "faces.bin", faces);

  binio::write_f32(dir / "skin_weights.bin", from_matrix(body.skin_weights));
  binio::write_f32(dir / "joint_regressor.bin", from_matrix(body.joint_regressor));
  binio::write_f32(dir / "shape_dirs.bin", from_matrix(body.shape_dirs));
  Eigen::MatrixXd pose_dirs = body.pose_dirs;
  if (pose_dirs.size() == 0) pose_dirs = Eigen::MatrixXd::Zero(3 * body.num_vertices(), 9 * (body.num_joints() - 1));
  binio::write_f32(dir / "pose_dirs.bin", from_matrix(pose_dirs));
}

}  // namespace drape
