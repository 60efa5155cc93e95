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


#include <cmath>
#include <random>

#include <doctest.h>

#include "drape/eval_metrics.hpp"
#include "oracles.hpp"

using namespace drape;

namespace {

Points random_joints(std::mt19937_64& rng, int n, double spread = 0.5) {
  std::uniform_real_distribution<double> u(-spread, spread);
  Points p(static_cast<std::size_t>(n));
  for (auto& x : p) x = Vec3(u(rng), u(rng), u(rng));
  return p;
}

Points transform(const Points& pts, double s, const Mat3& R, const Vec3& t) {
  Points out;
  for (const auto& p : pts) out.push_back(s * R * p + t);
  return out;
}

}  // namespace

TEST_CASE("identity alignment") {
  std::mt19937_64 rng(1);
  const Points gt = random_joints(rng, 24);
  const auto t = procrustes_align(gt, gt);
  CHECK(t.scale == doctest::Approx(1).epsilon(1e-12));
  CHECK((t.rotation - Mat3::Identity()).norm() < 1e-12);
  CHECK(t.translation.norm() < 1e-12);
  CHECK(pa_mpjpe(gt, gt) < 1e-9);
  CHECK(mpjpe(gt, gt) == 0);
}

TEST_CASE("exact recovery of a similarity") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Points gt = random_joints(rng, 24);
    const Mat3 R0 = oracle::random_rotation(rng);
    const Vec3 t0(0.3, -1.2, 4.0);
    // pred = 2·R0·gt + t0, so the alignment is (0.5, R0ᵀ, −0.5·R0ᵀ·t0).
    const Points pred = transform(gt, 2.0, R0, t0);
    const auto t = procrustes_align(pred, gt);
    CHECK(t.scale == doctest::Approx(0.5).epsilon(1e-12));
    CHECK((t.rotation - R0.transpose()).norm() < 1e-10);
    CHECK((t.translation + 0.5 * R0.transpose() * t0).norm() < 1e-10);
    CHECK(pa_mpjpe(pred, gt) < 1e-6);
  }
}

TEST_CASE("residual matches the search oracle") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0, 0.03);
  for (int trial = 0; trial < 20; ++trial) {
    const Points gt = random_joints(rng, 24);
    Points pred = transform(gt, 0.8 + 0.05 * trial, oracle::random_rotation(rng), Vec3(1, 2, 3));
    for (auto& p : pred) p += Vec3(noise(rng), noise(rng), noise(rng));
    const double got = alignment_residual(procrustes_align(pred, gt), pred, gt);
    const auto want = oracle::brute_force_align(pred, gt, 5000, static_cast<std::uint64_t>(trial));
    CHECK(got <= want.residual * (1 + 1e-9) + 1e-15);
    CHECK(std::abs(got - want.residual) < 1e-6);
  }
}

TEST_CASE("aligned error is invariant to a similarity of the prediction") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0, 0.05);
  std::uniform_real_distribution<double> scale(0.2, 5), u(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const Points gt = random_joints(rng, 14);
    Points pred = gt;
    for (auto& p : pred) p += Vec3(noise(rng), noise(rng), noise(rng));
    const double base = pa_mpjpe(pred, gt);
    const Points moved = transform(pred, scale(rng), oracle::random_rotation(rng), Vec3(u(rng), u(rng), u(rng)));
    CHECK(std::abs(pa_mpjpe(moved, gt) - base) < 1e-9);
  }
}

TEST_CASE("no random similarity beats the alignment") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0, 0.05);
  std::uniform_real_distribution<double> scale(0.5, 1.5), u(-0.5, 0.5);
  int beaten = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Points gt = random_joints(rng, 14);
    Points pred = gt;
    for (auto& p : pred) p += Vec3(noise(rng), noise(rng), noise(rng));
    const auto best = procrustes_align(pred, gt);
    const double r = alignment_residual(best, pred, gt);
    for (int k = 0; k < 100; ++k) {
      SimilarityTransform other{scale(rng), oracle::random_rotation(rng), Vec3(u(rng), u(rng), u(rng))};
      // Half the candidates are small perturbations of the optimum.
      if (k % 2 == 0) {
        other.scale = best.scale * (1 + 0.01 * u(rng));
        other.rotation = oracle::quat_matrix(Vec3(u(rng), u(rng), u(rng)) * 0.02) * best.rotation;
        other.translation = best.translation + 0.01 * Vec3(u(rng), u(rng), u(rng));
      }
      beaten += alignment_residual(other, pred, gt) < r;
    }
  }
  CHECK(beaten == 0);
}

TEST_CASE("aligned versus unaligned error") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise(0, 0.05);
  auto rms = [](const Points& a, const Points& b, const SimilarityTransform& t) {
    return std::sqrt(alignment_residual(t, a, b) / static_cast<double>(a.size()));
  };
  // Optimality holds for the squared error. The mean of norms usually
  // follows but is not guaranteed to.
  int mean_worse = 0;
  Points bad_pred, bad_gt;
  for (int trial = 0; trial < 1000; ++trial) {
    const Points gt = random_joints(rng, 24);
    Points pred = gt;
    for (auto& p : pred) p += Vec3(noise(rng), noise(rng), noise(rng));
    CHECK(rms(pred, gt, procrustes_align(pred, gt)) <= rms(pred, gt, {}) + 1e-12);
    if (pa_mpjpe(pred, gt) > mpjpe(pred, gt) + 1e-9) {
      ++mean_worse;
      bad_pred = pred;
      bad_gt = gt;
    }
  }
  CHECK(mean_worse < 10);
  // Keep one concrete counterexample to the mean-error inequality.
  REQUIRE(mean_worse > 0);
  CHECK(pa_mpjpe(bad_pred, bad_gt) > mpjpe(bad_pred, bad_gt));
  CHECK(alignment_residual(procrustes_align(bad_pred, bad_gt), bad_pred, bad_gt) <
        alignment_residual({}, bad_pred, bad_gt));
}

TEST_CASE("unaligned error of a pure offset") {
  std::mt19937_64 rng(7);
  const Points gt = random_joints(rng, 24);
  Points pred = gt;
  for (auto& p : pred) p += Vec3(0.006, 0, 0.008);
  CHECK(mpjpe(pred, gt) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(pa_mpjpe(pred, gt) < 1e-9);
}

TEST_CASE("degenerate inputs") {
  const Points same(5, Vec3(1, 2, 3));
  std::mt19937_64 rng(8);
  const Points other = random_joints(rng, 5);
  CHECK_THROWS_AS(procrustes_align(other, same), MetricError);
  CHECK_THROWS_AS(procrustes_align(same, other), MetricError);
  CHECK_THROWS_AS(procrustes_align(Points(2, Vec3::Zero()), Points(2, Vec3::Zero())), MetricError);
  CHECK_THROWS_AS(mpjpe(other, Points(4, Vec3::Zero())), MetricError);
}

TEST_CASE("determinant guard") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    // Mirror image: the best proper rotation is not a reflection.
    const Points gt = random_joints(rng, 10);
    Points pred = gt;
    for (auto& p : pred) p[0] = -p[0];
    const auto t = procrustes_align(pred, gt);
    CHECK(t.rotation.determinant() == doctest::Approx(1).epsilon(1e-12));
    CHECK((t.rotation.transpose() * t.rotation - Mat3::Identity()).norm() < 1e-12);
    const auto want = oracle::brute_force_align(pred, gt, 2000, static_cast<std::uint64_t>(trial));
    CHECK(alignment_residual(t, pred, gt) <= want.residual + 1e-9);

    // Coplanar joints: rank-2 covariance.
    Points flat(6);
    for (auto& p : flat) p = Vec3(u(rng), u(rng), 0);
    const Mat3 R = oracle::random_rotation(rng);
    const Points rotated = transform(flat, 1.0, R, Vec3::Zero());
    const auto f = procrustes_align(flat, rotated);
    CHECK(f.rotation.determinant() == doctest::Approx(1).epsilon(1e-12));
    CHECK((f.rotation - R).norm() < 1e-9);
  }
}

TEST_CASE("joint subset") {
  const auto subset = joint_subset14();
  CHECK(subset.size() == 14);
  Points joints;
  for (int j = 0; j < 24; ++j) joints.emplace_back(j, 0, 0);
  const Points picked = select_joints(joints, subset);
  for (std::size_t k = 0; k < subset.size(); ++k) CHECK(picked[k][0] == subset[k]);
  CHECK_THROWS_AS(select_joints(Points(10, Vec3::Zero()), subset), MetricError);
}

TEST_CASE("aggregation") {
  std::vector<EvalSample> equal(7, {42.0, true});
  CHECK(aggregate(equal, EvalFilter::All) == doctest::Approx(42.0));

  // 20 entries: occluded ones at 10 + k, visible ones at 100 + k.
  std::vector<EvalSample> samples;
  double occ_sum = 0, all_sum = 0;
  int occ = 0;
  for (int k = 0; k < 20; ++k) {
    const bool o = k % 3 != 0;
    const double v = o ? 10.0 + k : 100.0 + k;
    samples.push_back({v, o});
    all_sum += v;
    if (o) {
      occ_sum += v;
      ++occ;
    }
  }
  CHECK(aggregate(samples, EvalFilter::All) == doctest::Approx(all_sum / 20));
  CHECK(aggregate(samples, EvalFilter::OccludedOnly) == doctest::Approx(occ_sum / occ));
  CHECK_THROWS_AS(aggregate(std::vector<EvalSample>{}, EvalFilter::All), MetricError);
  CHECK_THROWS_AS(aggregate(std::vector<EvalSample>(3, {1.0, false}), EvalFilter::OccludedOnly), MetricError);
}
