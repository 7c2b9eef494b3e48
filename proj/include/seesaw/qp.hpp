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

#include <vector>

#include "seesaw/spatial.hpp"

namespace seesaw {

/// Dense convex quadratic program
///   min 1/2 x'Qx + c'x  s.t.  A_eq x = b_eq,  A_in x <= b_in.
/// Q must be symmetric positive semidefinite; the solver regularizes it
/// internally with +1e-9 I so the problem it actually solves is strictly
/// convex.
struct QProblem {
  MatX Q;
  VecX c;
  MatX A_eq;  // p x d, may have zero rows
  VecX b_eq;
  MatX A_in;  // m x d, may have zero rows
  VecX b_in;
};

enum class QpStatus { Optimal, Infeasible, MaxIterations };

struct QpSolution {
  VecX x;
  std::vector<int> active_set;  // indices into A_in rows, ascending
  QpStatus status = QpStatus::Infeasible;
  double objective = 0.0;  // 1/2 x'Qx + c'x with the caller's Q
  int iterations = 0;
  VecX multipliers_in;        // m, >= 0, zero off the active set
  VecX multipliers_eq;        // p
  double kkt_residual = 0.0;  // max of stationarity/feasibility/complementarity
  double infeasibility = 0.0; // residual certificate when status == Infeasible
};

/// Dual active-set solve (Goldfarb-Idnani iteration with fresh KKT solves
/// each step; equality constraints eliminated through a null-space basis).
/// Deterministic: constraint selection ties break on the lowest index.
QpSolution solve_qp(const QProblem& qp);

/// Brute-force reference: solves the equality-constrained subproblem for
/// every subset of inequality constraints and keeps the feasible optimum.
/// Test oracle only; throws std::invalid_argument when rows(A_in) +
/// rows(A_eq) > 14.
QpSolution enumerate_qp_oracle(const QProblem& qp);

}  // namespace seesaw
