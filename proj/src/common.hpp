// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridflow {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kHoursPerYear = 8760;

// Thrown for malformed inputs (bad files, bad arguments, broken invariants).
class InvalidInput : public std::runtime_error {
 public:
  explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an optimization subproblem cannot be solved.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

inline bool is_finite(double v) { return std::isfinite(v); }

// Empirical quantile of an already sorted sample, sorted-sample linear
// interpolation (q = 0 gives the minimum, q = 1 the maximum).
inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidInput("quantile of empty series");
  if (q < 0.0 || q > 1.0) throw InvalidInput("quantile probability outside [0,1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<size_t>(pos);
  if (i + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

inline double mean(std::span<const double> v) {
  if (v.empty()) throw InvalidInput("mean of empty series");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// GW sustained over one year, expressed in TWh.
inline double gw_to_twh_per_year(double gw) { return gw * kHoursPerYear * 1e-3; }

}  // namespace gridflow
