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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "drape/body_model.hpp"
#include "drape/cloth_sim.hpp"
#include "drape/eval_metrics.hpp"
#include "drape/image_io.hpp"
#include "drape/manifest.hpp"
#include "drape/render_composite.hpp"
#include "drape/scene_setup.hpp"
#include "drape/sequence_io.hpp"

namespace drape {

struct GenerationConfig {
  SceneConfig scene;
  SimParams sim;
  int grid_res = 76;  // 75² cells
  double blanket_mass = 0.3;  // kg
  int warmup_frames = 24;
  int min_restart_gap = 48;
  double margin = 0.0005;
  int render_subdivision = 1;
  RenderOptions render{.holdout_bias = 0.01};
  ImageEncoder encoder = ImageEncoder::Png;
  PoseOptions pose;
  bool telemetry = true;
  int jobs = 1;
  std::filesystem::path model;  // overrides the sequence's body_model entry when set

  void validate() const;
};

enum class FrameOutcome { Ok, Detached, SimError };

/// One segment's worth of simulation, driven by schedule_segments().
/// begin() warms up at the start frame, advance() brings the state to a
/// frame and reports whether the blanket is still usable there, emit()
/// produces that frame's output.
class SegmentSimulator {
 public:
  virtual ~SegmentSimulator() = default;
  virtual void begin(int start_frame) = 0;
  virtual FrameOutcome advance(int frame) = 0;
  virtual void emit(int frame) = 0;
  virtual void end(SegmentRecord& record) = 0;  // may annotate color and seed
};

/// Walks frames [0, num_frames) segment by segment. After a failure at
/// frame f in a segment started at s the next start is max(f + 1, s + min_gap).
/// Exceptions from begin()/advance() of type SimulationError close the
/// segment with status SimError.
std::vector<SegmentRecord> schedule_segments(int num_frames, int subject, int min_gap, SegmentSimulator& sim);

std::string video_id(const std::string& sequence_id, int subject, int start_frame);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view text);

/// Per-video blanket color from the run seed and the video id.
BlanketMaterial video_material(std::uint64_t seed, const std::string& video_id);

struct SubjectRun {
  std::vector<VideoFragment> videos;
  std::vector<SegmentEntry> segments;
};

/// Generates every segment for one subject of one sequence, writing frames
/// and telemetry under `out`.
SubjectRun run_video(const SequenceInput& seq, const BodyTemplate& body, int subject, const std::filesystem::path& out,
                     const GenerationConfig& config, std::uint64_t seed);

/// Absolute-indexed frame path relative to the output root.
std::string frame_relpath(const SequenceInput& seq, const std::string& video, int frame, ImageEncoder encoder);

void write_frame(const std::filesystem::path& out, const std::string& relpath, const FrameImage& image,
                 ImageEncoder encoder);

struct RunSummary {
  std::size_t sequences = 0;
  std::size_t videos = 0;
  std::size_t frames = 0;
  std::size_t detached = 0;
  std::size_t sim_errors = 0;
  std::size_t failed_jobs = 0;  // jobs aborted by an I/O or input error
};

/// `input` is either a sequence folder (has sequence.json) or a folder of
/// sequence folders. Jobs are (sequence, subject) pairs; results are
/// assembled in job order so output does not depend on `config.jobs`.
RunSummary generate_dataset(const std::filesystem::path& input, const std::filesystem::path& out,
                            const GenerationConfig& config, std::uint64_t seed);

struct EvalReport {
  double pa_mpjpe = 0;
  double mpjpe = 0;
  std::size_t count = 0;
};

/// Predictions: JSON header {format "drape-predictions", endianness,
/// num_joints, entries [{image_id, subject}], joints {file, shape [E, J, 3]}}
/// plus a float32 binary of camera-frame joints in meters.
EvalReport evaluate_predictions(const std::filesystem::path& predictions, const std::filesystem::path& manifest,
                                EvalFilter filter, bool subset14);

struct PredictionEntry {
  std::int64_t image_id = 0;
  int subject = 0;
  Points joints;
};

void write_predictions(const std::filesystem::path& file, const std::vector<PredictionEntry>& entries);

}  // namespace drape
