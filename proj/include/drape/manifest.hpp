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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "drape/geometry.hpp"
#include "drape/scene_setup.hpp"
#include "drape/sequence_io.hpp"

namespace drape {

enum class SegmentStatus { Completed, Detached, SimError };

std::string_view to_string(SegmentStatus status);
SegmentStatus parse_segment_status(std::string_view name);

/// One simulated segment. Emitted frames are [start_frame, start_frame + frame_count).
/// For a completed segment end_frame is the last emitted frame; for a
/// detached or failed one it is the frame that failed (not emitted).
struct SegmentRecord {
  int start_frame = 0;
  int end_frame = 0;
  int frame_count = 0;
  int subject = 0;
  SegmentStatus status = SegmentStatus::Completed;
  Vec3 blanket_color = Vec3::Zero();  // linear RGB
  std::uint64_t seed = 0;
  std::string message;  // simulation error text, if any

  bool operator==(const SegmentRecord&) const = default;
};

struct SubjectAnnotation {
  int subject = 0;
  bool occluded = false;
  Points joints_3d;                   // camera frame, meters
  std::vector<std::array<double, 3>> keypoints;  // u, v, visibility (2 projected, 0 behind camera)
  std::array<double, 4> bbox{};       // x, y, w, h over projected joints
};

struct FrameRecord {
  int frame = 0;
  std::string file;  // relative to the output root, '/' separated
  std::vector<SubjectAnnotation> subjects;
};

/// Everything one generated video contributes to a manifest.
struct VideoFragment {
  std::string video_id;
  std::string sequence_id;
  Split split = Split::Train;
  int width = 0, height = 0;
  SegmentRecord segment;
  std::vector<FrameRecord> frames;
};

/// Segments that produced no frames still belong in the bookkeeping.
struct SegmentEntry {
  std::string video_id;
  std::string sequence_id;
  Split split = Split::Train;
  SegmentRecord segment;
};

struct ManifestInput {
  std::vector<VideoFragment> videos;
  std::vector<SegmentEntry> segments;
  int num_joints = 0;
  std::vector<int> parents;
};

inline constexpr int kManifestVersion = 1;

std::filesystem::path manifest_path(const std::filesystem::path& out, Split split);

/// Writes `<out>/annotations/<split>.json` for all three splits (empty ones
/// included). Ids are assigned in video-id order. Throws InvalidInput on a
/// duplicate video id.
void write_manifests(const ManifestInput& input, const std::filesystem::path& out);

struct ManifestAnnotation {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  int subject = 0;
  bool occluded = false;
  Points joints_3d;
  std::vector<std::array<double, 3>> keypoints;
};

struct ManifestImage {
  std::int64_t id = 0;
  std::string video_id;
  int frame = 0;
  std::string file;
};

struct ManifestVideo {
  std::string id;
  std::string sequence_id;
  int subject = 0;
  int start_frame = 0, end_frame = 0, frame_count = 0;
  std::string status;
};

struct Manifest {
  Split split = Split::Train;
  int version = 0;
  std::vector<ManifestVideo> videos;
  std::vector<ManifestImage> images;
  std::vector<ManifestAnnotation> annotations;
};

Manifest read_manifest(const std::filesystem::path& file);

struct AuditReport {
  std::size_t videos = 0;
  std::size_t files = 0;
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }
};

/// Checks that manifest images and files under `<out>/<split>/` correspond
/// one to one and follow `<split>/<sequence>/<video>/frame_%06d.<ext>`.
AuditReport audit_output(const std::filesystem::path& out);

}  // namespace drape
