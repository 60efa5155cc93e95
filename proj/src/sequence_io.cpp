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


#include "drape/sequence_io.hpp"

#include <cmath>
#include <fstream>

#include <Eigen/SVD>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "drape/binary_io.hpp"

namespace drape {

using nlohmann::json;

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Test: return "test";
    case Split::Validation: return "validation";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "test") return Split::Test;
  if (name == "validation") return Split::Validation;
  throw IngestError(fmt::format("unknown split '{}' (expected train, test or validation)", name));
}

std::string FramePattern::file_name(int frame) const {
  return fmt::format("{}{:0{}d}.{}", prefix, frame, digits, extension);
}

CameraModel SequenceInput::camera(int frame) const {
  CameraModel c = intrinsics;
  c.rotation = camera_rotations.at(static_cast<std::size_t>(frame));
  c.translation = camera_translations.at(static_cast<std::size_t>(frame));
  return c;
}

std::filesystem::path SequenceInput::frame_path(int frame) const {
  return root / frames.directory / frames.file_name(frame);
}

void SequenceInput::validate() const {
  if (id.empty()) throw IngestError("sequence id is empty");
  if (!(frame_rate > 0 && std::isfinite(frame_rate))) throw IngestError(fmt::format("frame_rate must be > 0 (got {})", frame_rate));
  if (subjects.empty()) throw IngestError("sequence has no subjects");
  const auto n = camera_rotations.size();
  if (camera_translations.size() != n)
    throw IngestError(fmt::format("camera rotations have {} frames but camera translations have {}", n,
                                  camera_translations.size()));
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    if (subjects[s].poses.size() != n)
      throw IngestError(fmt::format("subject {} has {} pose frames but the camera has {} frames", s,
                                    subjects[s].poses.size(), n));
  }
  try {
    CameraModel probe = intrinsics;
    probe.rotation = Mat3::Identity();
    probe.translation = Vec3::Zero();
    probe.validate();
    for (std::size_t f = 0; f < n; ++f) {
      try {
        camera(static_cast<int>(f)).validate();
      } catch (const InvalidInput& e) {
        throw IngestError(fmt::format("camera at frame {}: {}", f, e.what()));
      }
    }
  } catch (const InvalidInput& e) {
    throw IngestError(fmt::format("intrinsics: {}", e.what()));
  }
}

namespace {

std::vector<std::size_t> shape_of(const json& arrays, const char* name) {
  try {
    return arrays.at(name).at("shape").get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    throw IngestError(fmt::format("sequence.json: arrays.{}: {}", name, e.what()));
  }
}

std::filesystem::path file_of(const std::filesystem::path& dir, const json& arrays, const char* name) {
  try {
    return dir / arrays.at(name).at("file").get<std::string>();
  } catch (const json::exception& e) {
    throw IngestError(fmt::format("sequence.json: arrays.{}: {}", name, e.what()));
  }
}

void expect_shape(const char* name, const std::vector<std::size_t>& shape, std::size_t rank) {
  if (shape.size() != rank)
    throw IngestError(fmt::format("arrays.{} must have rank {} (got {})", name, rank, shape.size()));
}

std::size_t product(const std::vector<std::size_t>& shape) {
  std::size_t p = 1;
  for (auto s : shape) p *= s;
  return p;
}

void check_finite(const std::vector<float>& data, const char* name, std::size_t per_frame, std::size_t frames) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      const std::size_t frame = (i / per_frame) % std::max<std::size_t>(frames, 1);
      throw IngestError(fmt::format("{}: non-finite value at frame {} (element {})", name, frame, i));
    }
  }
}

}  // namespace

SequenceInput ingest_sequence(const std::filesystem::path& dir) {
  const auto meta_path = dir / "sequence.json";
  std::ifstream in(meta_path);
  if (!in) throw IngestError(fmt::format("cannot open {}", meta_path.string()));
  json meta;
  try {
    meta = json::parse(in);
  } catch (const json::exception& e) {
    throw IngestError(fmt::format("{}: {}", meta_path.string(), e.what()));
  }

  SequenceInput seq;
  seq.root = dir;
  json arrays;
  try {
    if (meta.value("format", "") != "drape-sequence")
      throw IngestError(fmt::format("{}: format must be \"drape-sequence\"", meta_path.string()));
    if (meta.value("endianness", "little") != "little") throw IngestError("sequence binaries must be little-endian");
    seq.id = meta.at("id").get<std::string>();
    seq.frame_rate = meta.at("frame_rate").get<double>();
    seq.split = parse_split(meta.at("split").get<std::string>());
    const auto& k = meta.at("intrinsics");
    seq.intrinsics.fx = k.at("fx").get<double>();
    seq.intrinsics.fy = k.at("fy").get<double>();
    seq.intrinsics.cx = k.at("cx").get<double>();
    seq.intrinsics.cy = k.at("cy").get<double>();
    seq.intrinsics.width = k.at("width").get<int>();
    seq.intrinsics.height = k.at("height").get<int>();
    if (meta.contains("frames")) {
      const auto& fr = meta.at("frames");
      seq.frames.directory = fr.value("directory", seq.frames.directory);
      seq.frames.prefix = fr.value("prefix", seq.frames.prefix);
      seq.frames.digits = fr.value("digits", seq.frames.digits);
      seq.frames.extension = fr.value("extension", seq.frames.extension);
    }
    if (meta.contains("body_model")) seq.body_model = meta.at("body_model").get<std::string>();
    arrays = meta.at("arrays");
  } catch (const json::exception& e) {
    throw IngestError(fmt::format("{}: {}", meta_path.string(), e.what()));
  }

  const auto pose_shape = shape_of(arrays, "poses");                      // S, N, J, 3
  const auto trans_shape = shape_of(arrays, "translations");              // S, N, 3
  const auto beta_shape = shape_of(arrays, "betas");                      // S, B
  const auto rot_shape = shape_of(arrays, "camera_rotations");            // N, 3, 3
  const auto cam_t_shape = shape_of(arrays, "camera_translations");       // N, 3
  expect_shape("poses", pose_shape, 4);
  expect_shape("translations", trans_shape, 3);
  expect_shape("betas", beta_shape, 2);
  expect_shape("camera_rotations", rot_shape, 3);
  expect_shape("camera_translations", cam_t_shape, 2);
  if (pose_shape[3] != 3 || trans_shape[2] != 3 || rot_shape[1] != 3 || rot_shape[2] != 3 || cam_t_shape[1] != 3)
    throw IngestError("sequence arrays must have trailing dimension 3 (3×3 for rotations)");

  const std::size_t S = pose_shape[0], N = pose_shape[1], J = pose_shape[2];
  if (S == 0) throw IngestError("sequence has no subjects");
  if (rot_shape[0] != N)
    throw IngestError(fmt::format("poses have {} frames but camera_rotations have {} frames", N, rot_shape[0]));
  if (cam_t_shape[0] != N)
    throw IngestError(
        fmt::format("poses have {} frames but camera_translations have {} frames", N, cam_t_shape[0]));
  if (trans_shape[0] != S || trans_shape[1] != N)
    throw IngestError(fmt::format("translations are {}x{} (subjects x frames), poses are {}x{}", trans_shape[0],
                                  trans_shape[1], S, N));
  if (beta_shape[0] != S)
    throw IngestError(fmt::format("betas have {} subjects, poses have {}", beta_shape[0], S));
  if (meta.contains("num_subjects") && meta["num_subjects"].get<std::size_t>() != S)
    throw IngestError(fmt::format("num_subjects is {} but poses have {} subjects", meta["num_subjects"].get<std::size_t>(), S));

  const auto poses = binio::read_f32(file_of(dir, arrays, "poses"), product(pose_shape));
  const auto trans = binio::read_f32(file_of(dir, arrays, "translations"), product(trans_shape));
  const auto betas = binio::read_f32(file_of(dir, arrays, "betas"), product(beta_shape));
  const auto rots = binio::read_f32(file_of(dir, arrays, "camera_rotations"), product(rot_shape));
  const auto cam_t = binio::read_f32(file_of(dir, arrays, "camera_translations"), product(cam_t_shape));
  check_finite(poses, "poses", J * 3, N);
  check_finite(trans, "translations", 3, N);
  check_finite(betas, "betas", beta_shape[1], 1);
  check_finite(rots, "camera_rotations", 9, N);
  check_finite(cam_t, "camera_translations", 3, N);

  seq.subjects.resize(S);
  for (std::size_t s = 0; s < S; ++s) {
    auto& track = seq.subjects[s];
    track.shape.betas.assign(betas.begin() + static_cast<std::ptrdiff_t>(s * beta_shape[1]),
                             betas.begin() + static_cast<std::ptrdiff_t>((s + 1) * beta_shape[1]));
    track.poses.resize(N);
    for (std::size_t f = 0; f < N; ++f) {
      auto& pose = track.poses[f];
      pose.joint_rotations.resize(J);
      for (std::size_t j = 0; j < J; ++j) {
        const std::size_t o = ((s * N + f) * J + j) * 3;
        pose.joint_rotations[j] = normalize_axis_angle(Vec3(poses[o], poses[o + 1], poses[o + 2]));
      }
      const std::size_t o = (s * N + f) * 3;
      pose.root_translation = Vec3(trans[o], trans[o + 1], trans[o + 2]);
    }
  }
  seq.camera_rotations.resize(N);
  seq.camera_translations.resize(N);
  for (std::size_t f = 0; f < N; ++f) {
    Mat3 R;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) R(r, c) = rots[f * 9 + static_cast<std::size_t>(3 * r + c)];
    // float32 storage; re-orthonormalize.
    Eigen::JacobiSVD<Mat3> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 Rn = svd.matrixU() * svd.matrixV().transpose();
    if ((R - Rn).cwiseAbs().maxCoeff() > 1e-4 || Rn.determinant() < 0)
      throw IngestError(fmt::format("camera_rotations: frame {} is not a rotation matrix", f));
    seq.camera_rotations[f] = Rn;
    seq.camera_translations[f] = Vec3(cam_t[3 * f], cam_t[3 * f + 1], cam_t[3 * f + 2]);
  }
  seq.validate();
  return seq;
}

void write_sequence(const SequenceInput& seq, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::size_t S = seq.subjects.size();
  const std::size_t N = static_cast<std::size_t>(seq.num_frames());
  const std::size_t J = S > 0 && N > 0 ? seq.subjects[0].poses[0].joint_rotations.size() : 0;
  const std::size_t B = S > 0 ? seq.subjects[0].shape.betas.size() : 0;

  std::vector<float> poses, trans, betas, rots, cam_t;
  for (const auto& track : seq.subjects) {
    if (track.poses.size() != N || track.shape.betas.size() != B)
      throw InvalidInput("write_sequence: subjects disagree on frame or beta count");
    for (double b : track.shape.betas) betas.push_back(static_cast<float>(b));
    for (const auto& pose : track.poses) {
      if (pose.joint_rotations.size() != J) throw InvalidInput("write_sequence: joint count differs between frames");
      for (const auto& r : pose.joint_rotations)
        for (int c = 0; c < 3; ++c) poses.push_back(static_cast<float>(r[c]));
    }
  }
  for (const auto& track : seq.subjects)
    for (const auto& pose : track.poses)
      for (int c = 0; c < 3; ++c) trans.push_back(static_cast<float>(pose.root_translation[c]));
  for (std::size_t f = 0; f < N; ++f) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) rots.push_back(static_cast<float>(seq.camera_rotations[f](r, c)));
    for (int c = 0; c < 3; ++c) cam_t.push_back(static_cast<float>(seq.camera_translations[f][c]));
  }

  binio::write_f32(dir / "poses.bin", poses);
  binio::write_f32(dir / "translations.bin", trans);
  binio::write_f32(dir / "betas.bin", betas);
  binio::write_f32(dir / "camera_rotations.bin", rots);
  binio::write_f32(dir / "camera_translations.bin", cam_t);

  json meta = {
      {"format", "drape-sequence"},
      {"version", 1},
      {"endianness", "little"},
      {"id", seq.id},
      {"frame_rate", seq.frame_rate},
      {"split", std::string(to_string(seq.split))},
      {"num_subjects", S},
      {"num_frames", N},
      {"intrinsics",
       {{"fx", seq.intrinsics.fx},
        {"fy", seq.intrinsics.fy},
        {"cx", seq.intrinsics.cx},
        {"cy", seq.intrinsics.cy},
        {"width", seq.intrinsics.width},
        {"height", seq.intrinsics.height}}},
      {"frames",
       {{"directory", seq.frames.directory},
        {"prefix", seq.frames.prefix},
        {"digits", seq.frames.digits},
        {"extension", seq.frames.extension}}},
      {"arrays",
       {{"poses", {{"file", "poses.bin"}, {"shape", {S, N, J, 3}}}},
        {"translations", {{"file", "translations.bin"}, {"shape", {S, N, 3}}}},
        {"betas", {{"file", "betas.bin"}, {"shape", {S, B}}}},
        {"camera_rotations", {{"file", "camera_rotations.bin"}, {"shape", {N, 3, 3}}}},
        {"camera_translations", {{"file", "camera_translations.bin"}, {"shape", {N, 3}}}}}},
  };
  if (seq.body_model) meta["body_model"] = seq.body_model->generic_string();
  std::ofstream out(dir / "sequence.json");
  if (!out) throw IoError(fmt::format("cannot write {}", (dir / "sequence.json").string()));
  out << meta.dump(2) << '\n';
}

}  // namespace drape
