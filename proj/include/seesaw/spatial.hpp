// Copyright 2026 The seesaw-balance Authors
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

#include <Eigen/Dense>

namespace seesaw {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// Rotation matrices are plain 3x3 matrices; validity (orthonormal, det +1)
// is checked at construction/load boundaries with is_valid_rotation().
using Rotation = Mat3;

// All 6-vectors in this library are ordered (linear; angular):
// wrenches as (force; moment), twists as (v; omega), momenta likewise.

/// 6-D force/moment pair acting at some reference point.
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();

  Vec6 vec() const {
    Vec6 w;
    w << force, moment;
    return w;
  }
  static Wrench from(const Vec6& w) { return {w.head<3>(), w.tail<3>()}; }
};

/// 6-D twist of a frame: linear velocity of the origin plus angular velocity.
struct SpatialVelocity {
  Vec3 linear = Vec3::Zero();
  Vec3 angular = Vec3::Zero();

  Vec6 vec() const {
    Vec6 v;
    v << linear, angular;
    return v;
  }
  static SpatialVelocity from(const Vec6& v) { return {v.head<3>(), v.tail<3>()}; }
};

/// 6-D momentum (linear; angular about the reference point).
struct Momentum {
  Vec3 linear = Vec3::Zero();
  Vec3 angular = Vec3::Zero();

  Vec6 vec() const {
    Vec6 h;
    h << linear, angular;
    return h;
  }
  static Momentum from(const Vec6& h) { return {h.head<3>(), h.tail<3>()}; }
};

/// Skew-symmetric matrix S(v) with S(v) y = v x y.
Mat3 skew(const Vec3& v);

/// Rodrigues exponential map so(3) -> SO(3).
Rotation so3_exp(const Vec3& omega);

/// Logarithm SO(3) -> so(3), the inverse of so3_exp. Stable near identity
/// and near pi.
Vec3 so3_log(const Rotation& r);

bool is_valid_rotation(const Rotation& r, double tol = 1e-10);

/// 6x6 map transporting a wrench from one application point to another:
/// force is unchanged, moment picks up p_from_to x force.  p_from_to points
/// from the new reference point to the old one (p_from - p_to).
Mat6 wrench_transform(const Vec3& p_from_to);

/// diag(R, R): rotates both halves of a 6-vector.
Mat6 block_rotation(const Rotation& r);

/// diag(S(w), S(w)): the gyroscopic operator of a body-frame momentum.
Mat6 block_skew(const Vec3& w);

/// Moore-Penrose pseudoinverse (lambda = 0, SVD with relative cutoff
/// 1e-8 * sigma_max) or Tikhonov-damped inverse (lambda > 0).
MatX damped_pinv(const MatX& a, double lambda = 0.0);

/// N = I - pinv(A) * A, the orthogonal projector onto null(A).
MatX nullspace_projector(const MatX& a);

/// Numerical rank with threshold rel_tol * sigma_max.
int matrix_rank(const MatX& a, double rel_tol = 1e-8);

/// sigma_max / sigma_min (inf if singular).
double condition_number(const MatX& a);

}  // namespace seesaw
