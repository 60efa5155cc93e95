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
#include <string>

#include "drape/body_model.hpp"
#include "drape/render_composite.hpp"
#include "drape/sequence_io.hpp"

namespace drape {

/// Small closed ellipsoidal body with four joints (pelvis, chest, head,
/// legs) and two shape directions. The pelvis is regressed from the equator
/// ring, so the root joint sits at the origin for zero betas.
BodyTemplate make_toy_body(int rings = 11, int segments = 16);

struct ToySequenceOptions {
  std::string id = "toy";
  int frames = 60;
  int subjects = 1;
  int width = 128, height = 96;
  Split split = Split::Train;
};

/// Poses, camera track and intrinsics only (no frames on disk).
SequenceInput make_toy_sequence(const ToySequenceOptions& options);

/// Background frame content for the toy sequences.
FrameImage toy_background(int width, int height, int frame);

/// Writes a complete sequence folder: sequence.json, binaries, PNG frames
/// and the body model under `body_model/`.
void write_toy_sequence(const std::filesystem::path& dir, const ToySequenceOptions& options);

}  // namespace drape
