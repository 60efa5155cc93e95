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


#include "drape/eval_metrics.hpp"

#include <array>

#include <Eigen/SVD>
#include <fmt/format.h>

namespace drape {
namespace {

void check_pair(std::span<const Vec3> pred, std::span<const Vec3> gt, std::size_t min_joints) {
  if (pred.size() != gt.size())
    throw MetricError(fmt::format("joint count mismatch: {} predicted vs {} ground truth", pred.size(), gt.size()));
  if (pred.size() < min_joints)
    throw MetricError(fmt::format("need at least {} joints (got {})", min_joints, pred.size()));
}

Vec3 mean(std::span<const Vec3> pts) {
  Vec3 m = Vec3::Zero();
  for (const auto& p : pts) m += p;
  return m / static_cast<double>(pts.size());
}

}  // namespace

SimilarityTransform procrustes_align(std::span<const Vec3> pred, std::span<const Vec3> gt) {
  check_pair(pred, gt, 3);
  const Vec3 mu_p = mean(pred), mu_g = mean(gt);
  Mat3 cov = Mat3::Zero();
  double var_p = 0, var_g = 0;
  for (std::size_t j = 0; j < pred.size(); ++j) {
    const Vec3 x = pred[j] - mu_p, y = gt[j] - mu_g;
    cov += y * x.transpose();
    var_p += x.squaredNorm();
    var_g += y.squaredNorm();
  }
  if (!(var_g > 0)) throw MetricError("ground-truth joints are all coincident");
  if (!(var_p > 0)) throw MetricError("predicted joints are all coincident");

  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& U = svd.matrixU();
  const Mat3& V = svd.matrixV();
  Vec3 s(1, 1, 1);
  // Singular values come sorted in decreasing order; flip the smallest
  // direction when the unconstrained optimum would be a reflection.
  if (U.determinant() * V.determinant() < 0) s[2] = -1;

  SimilarityTransform t;
  t.rotation = U * s.asDiagonal() * V.transpose();
  t.scale = svd.singularValues().dot(s) / var_p;
  if (!(t.scale > 0)) throw MetricError("degenerate alignment (non-positive optimal scale)");
  t.translation = mu_g - t.scale * t.rotation * mu_p;
  return t;
}

double alignment_residual(const SimilarityTransform& t, std::span<const Vec3> pred, std::span<const Vec3> gt) {
  check_pair(pred, gt, 1);
  double sum = 0;
  for (std::size_t j = 0; j < pred.size(); ++j) sum += (t.apply(pred[j]) - gt[j]).squaredNorm();
  return sum;
}

double pa_mpjpe(std::span<const Vec3> pred, std::span<const Vec3> gt) {
  const auto t = procrustes_align(pred, gt);
  double sum = 0;
  for (std::size_t j = 0; j < pred.size(); ++j) sum += (t.apply(pred[j]) - gt[j]).norm();
  return 1000.0 * sum / static_cast<double>(pred.size());
}

double mpjpe(std::span<const Vec3> pred, std::span<const Vec3> gt) {
  check_pair(pred, gt, 1);
  double sum = 0;
  for (std::size_t j = 0; j < pred.size(); ++j) sum += (pred[j] - gt[j]).norm();
  return 1000.0 * sum / static_cast<double>(pred.size());
}

std::span<const int> joint_subset14() {
  // r_ankle, r_knee, r_hip, l_hip, l_knee, l_ankle, r_wrist, r_elbow,
  // r_shoulder, l_shoulder, l_elbow, l_wrist, neck, head
  static constexpr std::array<int, 14> kSubset = {8, 5, 2, 1, 4, 7, 21, 19, 17, 16, 18, 20, 12, 15};
  return kSubset;
}

Points select_joints(std::span<const Vec3> joints, std::span<const int> subset) {
  Points out;
  out.reserve(subset.size());
  for (int j : subset) {
    if (j < 0 || static_cast<std::size_t>(j) >= joints.size())
      throw MetricError(fmt::format("joint subset index {} out of range for {} joints", j, joints.size()));
    out.push_back(joints[static_cast<std::size_t>(j)]);
  }
  return out;
}

double aggregate(std::span<const EvalSample> samples, EvalFilter filter) {
  double sum = 0;
  std::size_t count = 0;
  for (const auto& s : samples) {
    if (filter == EvalFilter::OccludedOnly && !s.occluded) continue;
    sum += s.value_mm;
    ++count;
  }
  if (count == 0) throw MetricError("no samples left after filtering");
  return sum / static_cast<double>(count);
}

}  // namespace drape
