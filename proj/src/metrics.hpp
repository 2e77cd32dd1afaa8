// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "dispatch.hpp"
#include "grid.hpp"
#include "series.hpp"

namespace gridflow {

struct BenefitReport {
  std::string layout_name;
  double total_capacity = 0;       // GW; NaN when the layout is unbounded
  double e_b_zero = 0;             // TWh/yr
  double e_b_layout = 0;           // TWh/yr
  double e_b_unconstrained = 0;    // TWh/yr
  double beta = 0;
};

// Annual balancing energy of a dispatch run, TWh/yr.
double balancing_energy(const DispatchResult& result);

// beta = (E_B(0) - E_B(layout)) / (E_B(0) - E_B(inf)).
// Throws InvalidInput when the denominator vanishes.
double benefit(double e_b_zero, double e_b_layout, double e_b_unconstrained);

// Flow samples of an unconstrained run, ready for quantile layouts.
// Rejects constrained runs: their quantiles would depend on the layout.
FlowQuantileTable flow_table(const DispatchResult& unconstrained_run);

// Quantile layout from an unconstrained run (interpolation family C).
CapacityLayout flow_quantile_layout(const DispatchResult& unconstrained_run,
                                    double c);

struct SweepPoint {
  double param = 0;
  double total_capacity = 0;  // GW
  double e_b = 0;             // TWh/yr
  double beta = 0;
};

struct SweepInputs {
  const Topology* topo = nullptr;
  const std::vector<MismatchSeries>* mismatches = nullptr;
  double eps = -1;
  int threads = 0;
  const CapacityLayout* present = nullptr;  // family A
  const CapacityLayout* q99 = nullptr;      // families A and B
  const FlowQuantileTable* flows = nullptr; // family C
};

// One dispatch run per parameter; family is 'A', 'B' or 'C'.
std::vector<SweepPoint> sweep(char family, std::span<const double> params,
                              const SweepInputs& in);

struct CountryRow {
  std::string id;
  double residual_norm = 0;   // mean post-transmission residual / mean load
  double excess_norm = 0;     // mean post-transmission excess / mean load
  double q01 = 0, q10 = 0, q90 = 0, q99 = 0;  // post-transmission mismatch
  double import_share = 0;    // 1 - B(layout)/B(zero)
};

// Per-country statistics of a dispatch run. The post-transmission mismatch
// of node n at hour t is delta - (K F), i.e. curtailment - balancing.
std::vector<CountryRow> country_report(const DispatchResult& result,
                                       const std::vector<MismatchSeries>& ms,
                                       const std::vector<Node>& nodes);

struct Histogram {
  double bin_width = 0;
  std::vector<double> centers;
  std::vector<long long> counts;
  long long total = 0;  // samples binned (exact zeros may be excluded)
};

// Fixed-width histogram; values are divided by normalize_by when it is
// positive. Exact zeros are excluded by default.
Histogram mismatch_histogram(std::span<const double> series, double bin_width,
                             double normalize_by = 0,
                             bool exclude_zeros = true);

}  // namespace gridflow
