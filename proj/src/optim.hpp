// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <Eigen/Dense>

#include "common.hpp"

namespace gridflow {

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

struct SolveReport {
  Eigen::VectorXd x;
  double objective = 0;
  SolveStatus status = SolveStatus::NumericalFailure;
  int iterations = 0;
  double max_violation = 0;  // worst constraint/bound violation at x
};

// min cost' x  subject to  rows x <= rhs,  lower <= x <= upper.
// Bounds may be +-infinity; rows may be empty.
struct BoundedLp {
  Eigen::VectorXd cost;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::MatrixXd rows;
  Eigen::VectorXd rhs;
};

// min sum_i quad_i x_i^2 + cost' x  subject to  rows x <= rhs,
// lower <= x <= upper.  quad >= 0 elementwise; variables with quad_i = 0
// enter the objective linearly only.
struct BoxQp {
  Eigen::VectorXd quad;
  Eigen::VectorXd cost;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::MatrixXd rows;
  Eigen::VectorXd rhs;
};

constexpr double kFeasTol = 1e-7;

// Two-phase bounded-variable simplex with Bland's rule. Deterministic:
// identical inputs produce identical reports.
SolveReport solve_lp(const BoundedLp& p, double tol = 1e-9);

// Primal-dual interior-point method (Mehrotra predictor-corrector) on the
// box-and-rows form. Handles semidefinite objectives as long as each linear
// variable is bounded on at least one side or constrained by a row.
SolveReport solve_qp(const BoxQp& p, double tol = 1e-9);

}  // namespace gridflow
