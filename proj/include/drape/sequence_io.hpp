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
#include <optional>
#include <string>
#include <vector>

#include "drape/body_model.hpp"
#include "drape/scene_setup.hpp"

namespace drape {

enum class Split { Train, Test, Validation };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

struct SubjectTrack {
  ShapeParams shape;
  std::vector<PoseParams> poses;  // one per frame
};

struct FramePattern {
  std::string directory = "frames";
  std::string prefix = "frame_";
  int digits = 6;
  std::string extension = "png";

  std::string file_name(int frame) const;
};

/// A motion sequence: per-frame poses for every subject, per-frame camera
/// extrinsics, shared intrinsics and the original video frames on disk.
struct SequenceInput {
  std::string id;
  double frame_rate = 30.0;
  Split split = Split::Train;
  CameraModel intrinsics;  // rotation/translation unused; see camera(frame)
  std::vector<Mat3> camera_rotations;
  std::vector<Vec3> camera_translations;
  std::vector<SubjectTrack> subjects;
  FramePattern frames;
  std::filesystem::path root;                       // directory the sequence was read from
  std::optional<std::filesystem::path> body_model;  // relative to root

  int num_frames() const { return static_cast<int>(camera_rotations.size()); }
  CameraModel camera(int frame) const;
  std::filesystem::path frame_path(int frame) const;
  void validate() const;
};

/// Reads `<dir>/sequence.json` and its binaries. Throws IngestError naming
/// the offending field (and frame where applicable).
SequenceInput ingest_sequence(const std::filesystem::path& dir);

/// Writes sequence.json and the binaries into `dir` (frames are not touched).
void write_sequence(const SequenceInput& seq, const std::filesystem::path& dir);

}  // namespace drape
