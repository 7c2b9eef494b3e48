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

#include "seesaw/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace seesaw {

namespace {

constexpr double kRegularization = 1e-9;
constexpr double kFeasTol = 1e-9;

double objective_of(const QProblem& qp, const VecX& x) {
  return 0.5 * x.dot(qp.Q * x) + qp.c.dot(x);
}

void validate(const QProblem& qp) {
  const int d = static_cast<int>(qp.Q.rows());
  if (qp.Q.cols() != d || qp.c.size() != d) {
    throw std::invalid_argument("qp: Q must be square and match c");
  }
  if (qp.A_eq.rows() != qp.b_eq.size() || (qp.A_eq.rows() > 0 && qp.A_eq.cols() != d)) {
    throw std::invalid_argument("qp: equality block shape mismatch");
  }
  if (qp.A_in.rows() != qp.b_in.size() || (qp.A_in.rows() > 0 && qp.A_in.cols() != d)) {
    throw std::invalid_argument("qp: inequality block shape mismatch");
  }
}

// Null-space basis and minimum-norm particular solution of A x = b.
// Returns false when the system is inconsistent.
bool affine_solution(const MatX& a, const VecX& b, VecX* x_part, MatX* null_basis) {
  const int d = static_cast<int>(a.cols());
  if (a.rows() == 0) {
    *x_part = VecX::Zero(d);
    *null_basis = MatX::Identity(d, d);
    return true;
  }
  Eigen::JacobiSVD<MatX> svd(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const VecX& sv = svd.singularValues();
  const double cutoff = (sv.size() > 0 ? 1e-12 * std::max(1.0, sv(0)) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  VecX y = svd.matrixU().transpose() * b;
  VecX inv = VecX::Zero(sv.size());
  for (int i = 0; i < rank; ++i) inv(i) = y(i) / sv(i);
  *x_part = svd.matrixV().leftCols(sv.size()) * inv;
  if ((a * *x_part - b).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + b.cwiseAbs().maxCoeff())) {
    return false;
  }
  *null_basis = svd.matrixV().rightCols(d - rank);
  return true;
}

// KKT solve for the dual active-set step:
//   G z + N' mu = n,   N z = 0.
void step_direction(const MatX& g, const MatX& active_normals, const VecX& n, VecX* z, VecX* mu) {
  const int d = static_cast<int>(g.rows());
  const int na = static_cast<int>(active_normals.rows());
  if (na == 0) {
    *z = g.ldlt().solve(n);
    *mu = VecX();
    return;
  }
  MatX kkt(d + na, d + na);
  kkt.setZero();
  kkt.topLeftCorner(d, d) = g;
  kkt.topRightCorner(d, na) = active_normals.transpose();
  kkt.bottomLeftCorner(na, d) = active_normals;
  VecX rhs(d + na);
  rhs.head(d) = n;
  rhs.tail(na).setZero();
  VecX sol = kkt.fullPivLu().solve(rhs);
  *z = sol.head(d);
  *mu = sol.tail(na);
}

}  // namespace

QpSolution solve_qp(const QProblem& qp) {
  validate(qp);
  const int d = static_cast<int>(qp.Q.rows());
  const int m = static_cast<int>(qp.A_in.rows());
  const int p = static_cast<int>(qp.A_eq.rows());

  QpSolution sol;
  sol.multipliers_in = VecX::Zero(m);
  sol.multipliers_eq = VecX::Zero(p);

  const MatX g_full =
      0.5 * (qp.Q + qp.Q.transpose()) + kRegularization * MatX::Identity(d, d);

  VecX x_part;
  MatX z_basis;
  if (!affine_solution(qp.A_eq, qp.b_eq, &x_part, &z_basis)) {
    sol.status = QpStatus::Infeasible;
    sol.infeasibility = (qp.A_eq * x_part - qp.b_eq).cwiseAbs().maxCoeff();
    sol.x = x_part;
    return sol;
  }

  const int dr = static_cast<int>(z_basis.cols());
  const MatX g = z_basis.transpose() * g_full * z_basis;
  const VecX a0 = z_basis.transpose() * (qp.c + g_full * x_part);
  // Inequalities in reduced coordinates, flipped to `normal' y >= bound form.
  const MatX normals = -qp.A_in * z_basis;               // m x dr
  const VecX bounds = -(qp.b_in - qp.A_in * x_part);     // m

  VecX y = (dr > 0) ? VecX(g.ldlt().solve(-a0)) : VecX::Zero(0);

  std::vector<int> active;
  VecX duals(0);

  const int max_iter = 10 * (m + p) + 10;
  int iter = 0;
  bool infeasible = false;

  while (iter < max_iter) {
    ++iter;
    // Most violated inequality; ties broken by lowest index.
    int worst = -1;
    double worst_violation = kFeasTol;
    for (int i = 0; i < m; ++i) {
      const double viol = bounds(i) - normals.row(i).dot(y);
      if (viol > worst_violation) {
        worst_violation = viol;
        worst = i;
      }
    }
    if (worst < 0) break;  // feasible, hence optimal for the dual iteration

    double u_plus = 0.0;
    const VecX n_plus = normals.row(worst).transpose();
    bool resolved = false;
    while (iter < max_iter) {
      MatX act_n(static_cast<int>(active.size()), dr);
      for (size_t k = 0; k < active.size(); ++k) act_n.row(k) = normals.row(active[k]);
      VecX z, r;
      step_direction(g, act_n, n_plus, &z, &r);

      const double slope = n_plus.dot(z);
      const bool has_primal_step = slope > 1e-12 * (1.0 + n_plus.squaredNorm());

      // Dual blocking step.
      double t1 = std::numeric_limits<double>::infinity();
      int drop = -1;
      for (size_t k = 0; k < active.size(); ++k) {
        if (r.size() > 0 && r(k) > 1e-12) {
          const double t = duals(k) / r(k);
          if (t < t1 - 1e-14) {
            t1 = t;
            drop = static_cast<int>(k);
          }
        }
      }
      const double violation = bounds(worst) - n_plus.dot(y);
      const double t2 = has_primal_step ? violation / slope
                                        : std::numeric_limits<double>::infinity();

      if (!has_primal_step && drop < 0) {
        infeasible = true;
        sol.infeasibility = violation;
        resolved = true;
        break;
      }

      const double t = std::min(t1, t2);
      if (has_primal_step) y += t * z;
      for (size_t k = 0; k < active.size(); ++k) duals(k) = std::max(0.0, duals(k) - t * r(k));
      u_plus += t;

      if (t2 <= t1) {
        active.push_back(worst);
        VecX nd(active.size());
        nd.head(duals.size()) = duals;
        nd(active.size() - 1) = u_plus;
        duals = nd;
        resolved = true;
        break;
      }
      // Partial step: drop the blocking constraint and retry.
      active.erase(active.begin() + drop);
      VecX nd(active.size());
      for (int k = 0, j = 0; k < duals.size(); ++k) {
        if (k != drop) nd(j++) = duals(k);
      }
      duals = nd;
      ++iter;
    }
    if (infeasible) break;
    if (!resolved) break;  // ran out of iterations mid-step
  }

  sol.x = x_part + (dr > 0 ? VecX(z_basis * y) : VecX::Zero(d));
  sol.iterations = iter;
  for (size_t k = 0; k < active.size(); ++k) sol.multipliers_in(active[k]) = duals(k);
  sol.active_set = active;
  std::sort(sol.active_set.begin(), sol.active_set.end());
  sol.objective = objective_of(qp, sol.x);

  if (infeasible) {
    sol.status = QpStatus::Infeasible;
    return sol;
  }
  if (iter >= max_iter) {
    sol.status = QpStatus::MaxIterations;
    return sol;
  }
  sol.status = QpStatus::Optimal;

  // Equality multipliers from stationarity, then the KKT residual report.
  VecX grad = g_full * sol.x + qp.c + qp.A_in.transpose() * sol.multipliers_in;
  if (p > 0) {
    sol.multipliers_eq = -damped_pinv(MatX(qp.A_eq.transpose())) * grad;
    grad += qp.A_eq.transpose() * sol.multipliers_eq;
  }
  double res = grad.cwiseAbs().maxCoeff();
  if (p > 0) res = std::max(res, (qp.A_eq * sol.x - qp.b_eq).cwiseAbs().maxCoeff());
  for (int i = 0; i < m; ++i) {
    const double slack = qp.b_in(i) - qp.A_in.row(i).dot(sol.x);
    res = std::max(res, std::max(0.0, -slack));
    res = std::max(res, std::abs(sol.multipliers_in(i) * slack));
  }
  sol.kkt_residual = res;
  return sol;
}

QpSolution enumerate_qp_oracle(const QProblem& qp) {
  validate(qp);
  const int d = static_cast<int>(qp.Q.rows());
  const int m = static_cast<int>(qp.A_in.rows());
  const int p = static_cast<int>(qp.A_eq.rows());
  if (m + p > 14) {
    throw std::invalid_argument("enumerate_qp_oracle: problem too large to enumerate");
  }

  const MatX g_full =
      0.5 * (qp.Q + qp.Q.transpose()) + kRegularization * MatX::Identity(d, d);

  QpSolution best;
  best.status = QpStatus::Infeasible;
  best.multipliers_in = VecX::Zero(m);
  best.multipliers_eq = VecX::Zero(p);
  double best_obj = std::numeric_limits<double>::infinity();

  for (unsigned subset = 0; subset < (1u << m); ++subset) {
    std::vector<int> rows;
    for (int i = 0; i < m; ++i) {
      if (subset & (1u << i)) rows.push_back(i);
    }
    MatX a_c(p + static_cast<int>(rows.size()), d);
    VecX b_c(p + static_cast<int>(rows.size()));
    if (p > 0) {
      a_c.topRows(p) = qp.A_eq;
      b_c.head(p) = qp.b_eq;
    }
    for (size_t k = 0; k < rows.size(); ++k) {
      a_c.row(p + static_cast<int>(k)) = qp.A_in.row(rows[k]);
      b_c(p + static_cast<int>(k)) = qp.b_in(rows[k]);
    }

    VecX x_part;
    MatX z_basis;
    if (!affine_solution(a_c, b_c, &x_part, &z_basis)) continue;
    VecX x = x_part;
    if (z_basis.cols() > 0) {
      const MatX gr = z_basis.transpose() * g_full * z_basis;
      const VecX cr = z_basis.transpose() * (qp.c + g_full * x_part);
      x += z_basis * VecX(gr.ldlt().solve(-cr));
    }

    bool feasible = true;
    for (int i = 0; i < m && feasible; ++i) {
      if (qp.A_in.row(i).dot(x) > qp.b_in(i) + kFeasTol * (1.0 + std::abs(qp.b_in(i)))) {
        feasible = false;
      }
    }
    if (!feasible) continue;

    const double obj = objective_of(qp, x);
    if (obj < best_obj - 1e-12) {
      best_obj = obj;
      best.x = x;
      best.active_set = rows;
      best.objective = obj;
      best.status = QpStatus::Optimal;
    }
  }
  return best;
}

}  // namespace seesaw
