// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "grid.hpp"
#include "optim.hpp"
#include "series.hpp"

namespace gridflow {

// One solved hour: flows, per-node balancing and curtailment, and the
// step-1 minimum total balancing.
struct HourlyDispatch {
  Eigen::VectorXd flows;        // L, signed
  Eigen::VectorXd balancing;    // N, >= 0
  Eigen::VectorXd curtailment;  // N, >= 0
  double b_min = 0;             // GW
};

struct DispatchResult {
  std::vector<HourlyDispatch> hours;
  CapacityLayout layout;
  double eps = 0;
  bool unconstrained = false;  // true when every cap was infinite
};

// Default relaxation of the step-2 balancing equality, relative to the total
// residual load of the hour.
double default_eps(const Eigen::VectorXd& delta);

// Two-step constrained flow optimization for a single hour: step 1 minimizes
// total balancing (LP over flows and slack variables), step 2 picks the
// minimum-square flows that keep the total balancing within eps of step 1.
// Passing eps < 0 selects the default relaxation.
HourlyDispatch dispatch_hour(const Eigen::VectorXd& delta, const Topology& topo,
                             const CapacityLayout& layout, double eps = -1);

// Hourwise independent solves over a full series; the result does not depend
// on thread count or evaluation order.
DispatchResult dispatch_series(const std::vector<MismatchSeries>& ms,
                               const Topology& topo,
                               const CapacityLayout& layout, double eps = -1,
                               int threads = 0);

// Annual balancing energy of fully unconstrained transmission (TWh/yr),
// straight from the aggregate mismatch, no flow calculation.
double unconstrained_balancing(const std::vector<MismatchSeries>& ms);

// Annual balancing energy with zero transmission (TWh/yr): the country sum
// over individual negative mismatches.
double zero_balancing(const std::vector<MismatchSeries>& ms);

// Stacks per-node mismatch series into per-hour vectors in topology order.
std::vector<Eigen::VectorXd> stack_hours(const std::vector<MismatchSeries>& ms);

}  // namespace gridflow
