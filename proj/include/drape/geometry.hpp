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
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace drape {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// N×3 point arrays are stored as contiguous Vector3d (no padding), so they
// can be mapped as flat 3N vectors when a dense linear map is applied.
using Points = std::vector<Vec3>;
using Face = std::array<std::uint32_t, 3>;
using Faces = std::vector<Face>;

struct TriangleMesh {
  Points vertices;
  Faces faces;
};

/// Two triangles per cell of a res × res particle grid indexed j·res + i.
inline Faces grid_faces(int res) {
  Faces faces;
  const auto n = static_cast<std::uint32_t>(res);
  for (std::uint32_t j = 0; j + 1 < n; ++j) {
    for (std::uint32_t i = 0; i + 1 < n; ++i) {
      const std::uint32_t p00 = j * n + i, p10 = p00 + 1, p01 = p00 + n, p11 = p01 + 1;
      faces.push_back({p00, p10, p11});
      faces.push_back({p00, p11, p01});
    }
  }
  return faces;
}

inline Eigen::Map<Eigen::VectorXd> flatten(Points& p) {
  return {p.empty() ? nullptr : p.front().data(), static_cast<Eigen::Index>(3 * p.size())};
}
inline Eigen::Map<const Eigen::VectorXd> flatten(const Points& p) {
  return {p.empty() ? nullptr : p.front().data(), static_cast<Eigen::Index>(3 * p.size())};
}

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 extent() const { return hi - lo; }
  // Squared distance from p to the box (0 inside).
  double squared_distance(const Vec3& p) const {
    const Vec3 d = (lo - p).cwiseMax(p - hi).cwiseMax(0.0);
    return d.squaredNorm();
  }
};

inline Aabb bounds(const Points& pts) {
  Aabb b;
  for (const auto& p : pts) b.extend(p);
  return b;
}

inline bool all_finite(const Points& pts) {
  for (const auto& p : pts)
    if (!p.allFinite()) return false;
  return true;
}

// Error hierarchy. Every failure the engine reports is one of these.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidInput : Error {
  using Error::Error;
};
struct IngestError : Error {
  using Error::Error;
};
struct SimulationError : Error {
  using Error::Error;
};
struct MetricError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace drape
