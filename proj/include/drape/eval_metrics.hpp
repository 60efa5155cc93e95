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

#include <span>
#include <vector>

#include "drape/geometry.hpp"

namespace drape {

struct SimilarityTransform {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
};

/// Least-squares similarity mapping pred onto gt (Umeyama): centered
/// cross-covariance, SVD with a determinant guard, closed-form scale.
/// Throws MetricError for fewer than 3 joints, mismatched counts, or a
/// zero-variance input.
SimilarityTransform procrustes_align(std::span<const Vec3> pred, std::span<const Vec3> gt);

/// Sum of squared joint residuals after applying `t` to pred (meters²).
double alignment_residual(const SimilarityTransform& t, std::span<const Vec3> pred, std::span<const Vec3> gt);

/// Procrustes-aligned mean per-joint position error. Inputs in meters, result in mm.
double pa_mpjpe(std::span<const Vec3> pred, std::span<const Vec3> gt);

/// Unaligned mean per-joint position error. Inputs in meters, result in mm.
double mpjpe(std::span<const Vec3> pred, std::span<const Vec3> gt);

/// SMPL joint indices of the common 14-joint evaluation set (ankles, knees,
/// hips, wrists, elbows, shoulders, neck, head).
std::span<const int> joint_subset14();

Points select_joints(std::span<const Vec3> joints, std::span<const int> subset);

enum class EvalFilter { OccludedOnly, All };

struct EvalSample {
  double value_mm = 0;
  bool occluded = false;
};

/// Pooled mean over the retained (frame, subject) samples. Throws
/// MetricError when the filter leaves nothing.
double aggregate(std::span<const EvalSample> samples, EvalFilter filter);

}  // namespace drape
