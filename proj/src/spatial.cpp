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

#include "seesaw/spatial.hpp"

#include <cmath>
#include <limits>

namespace seesaw {

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return s;
}

Rotation so3_exp(const Vec3& omega) {
  const double theta = omega.norm();
  const Mat3 w = skew(omega);
  if (theta < 1e-8) {
    // 2nd-order Taylor keeps the result orthonormal to machine precision.
    return Mat3::Identity() + w + 0.5 * w * w;
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Mat3::Identity() + a * w + b * w * w;
}

Vec3 so3_log(const Rotation& r) {
  const Vec3 v(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  const double cos_theta = 0.5 * (r.trace() - 1.0);
  const double sin_theta = 0.5 * v.norm();
  const double theta = std::atan2(sin_theta, cos_theta);
  if (theta < 1e-9) {
    return 0.5 * v;
  }
  if (theta < M_PI - 1e-6) {
    return (theta / (2.0 * sin_theta)) * v;
  }
  // Near pi the vector part vanishes; recover the axis from R + I.
  const Mat3 b = 0.5 * (r + Mat3::Identity());
  Vec3 axis(std::sqrt(std::max(b(0, 0), 0.0)), std::sqrt(std::max(b(1, 1), 0.0)),
            std::sqrt(std::max(b(2, 2), 0.0)));
  int k;
  axis.maxCoeff(&k);
  for (int i = 0; i < 3; ++i) {
    if (i != k && b(k, i) < 0.0) axis(i) = -axis(i);
  }
  if (v(k) < 0.0) axis = -axis;
  return theta * axis.normalized();
}

bool is_valid_rotation(const Rotation& r, double tol) {
  const double orth = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  return orth <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

Mat6 wrench_transform(const Vec3& p_from_to) {
  Mat6 x = Mat6::Identity();
  x.block<3, 3>(3, 0) = skew(p_from_to);
  return x;
}

Mat6 block_rotation(const Rotation& r) {
  Mat6 b = Mat6::Zero();
  b.block<3, 3>(0, 0) = r;
  b.block<3, 3>(3, 3) = r;
  return b;
}

Mat6 block_skew(const Vec3& w) {
  Mat6 b = Mat6::Zero();
  b.block<3, 3>(0, 0) = skew(w);
  b.block<3, 3>(3, 3) = skew(w);
  return b;
}

MatX damped_pinv(const MatX& a, double lambda) {
  if (lambda > 0.0) {
    if (a.rows() <= a.cols()) {
      const MatX gram = a * a.transpose() + lambda * MatX::Identity(a.rows(), a.rows());
      return a.transpose() * gram.ldlt().solve(MatX::Identity(a.rows(), a.rows()));
    }
    const MatX gram = a.transpose() * a + lambda * MatX::Identity(a.cols(), a.cols());
    return gram.ldlt().solve(a.transpose());
  }
  Eigen::JacobiSVD<MatX> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecX& sv = svd.singularValues();
  if (sv.size() == 0) return MatX::Zero(a.cols(), a.rows());
  const double cutoff = 1e-8 * sv(0);
  VecX inv = VecX::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

MatX nullspace_projector(const MatX& a) {
  MatX n = MatX::Identity(a.cols(), a.cols()) - damped_pinv(a) * a;
  return 0.5 * (n + n.transpose());
}

int matrix_rank(const MatX& a, double rel_tol) {
  Eigen::JacobiSVD<MatX> svd(a);
  const VecX& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++rank;
  }
  return rank;
}

double condition_number(const MatX& a) {
  Eigen::JacobiSVD<MatX> svd(a);
  const VecX& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return sv(0) / sv(sv.size() - 1);
}

}  // namespace seesaw
