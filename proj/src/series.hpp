// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "grid.hpp"

namespace gridflow {

// Hourly load and raw wind/solar generation shapes for one country. The
// generation shapes carry arbitrary scale; mismatch() normalizes them to
// their own means.
struct CountrySeries {
  std::string id;
  std::vector<double> load;
  std::vector<double> wind_raw;
  std::vector<double> solar_raw;
};

// Throws InvalidInput if the series invariants do not hold (equal lengths,
// positive load, non-negative shapes with positive means).
void validate(const CountrySeries& cs);

struct MismatchSeries {
  std::string id;
  std::vector<double> delta;  // signed, GW
};

// delta(t) = gamma * (alpha * W/<W> + (1-alpha) * S/<S>) * <L> - L(t)
MismatchSeries mismatch(const CountrySeries& cs, double gamma, double alpha_w);

struct ResidualExcess {
  std::vector<double> residual;  // max(-delta, 0)
  std::vector<double> excess;    // max(delta, 0)
};

ResidualExcess residual_excess(const MismatchSeries& ms);

struct MixResult {
  double alpha_star = 0;     // argmin of the mean residual load
  double residual_mean = 0;  // GW, at alpha_star
  double band_low = 0;       // extreme mixes within 1% of the optimum
  double band_high = 0;
};

// Grid search over the mixing parameter; ties broken toward smaller alpha.
MixResult optimal_mix(const CountrySeries& cs, double gamma,
                      double grid_step = 0.01);

// Relative threshold for the near-optimal mix band reported by optimal_mix.
constexpr double kMixBandThreshold = 0.01;

// Rescales each year (given as half-open index ranges covering the series)
// multiplicatively so its mean equals the final year's mean.
std::vector<double> detrend(const std::vector<double>& load,
                            const std::vector<std::pair<int, int>>& years);

// Parameters of the synthetic data generator standing in for a real
// weather/load database. The seed fully determines the output.
struct SynthConfig {
  std::uint64_t seed = 1;
  double load_seasonal = 0.15;      // winter/summer load swing
  double load_diurnal = 0.20;       // day/night load swing
  double load_noise = 0.04;
  double wind_seasonal = 0.40;      // wind stronger in winter
  double solar_seasonal = 0.45;     // solar stronger in summer
  double noise_persistence = 0.97;  // AR(1) coefficient of the wind noise
  double noise_amplitude = 0.85;
  double regional_weight = 0.5;     // share of wind noise common to all nodes
  int sunrise_hour = 6;             // solar_raw is zero outside [sunrise, sunset)
  int sunset_hour = 19;
};

// Deterministic synthetic hourly series for the given nodes.
std::vector<CountrySeries> synth_generate(const SynthConfig& cfg,
                                          const std::vector<Node>& nodes,
                                          int hours);

// Sorted-sample linear-interpolation quantiles.
double quantile(std::span<const double> series, double q);
std::vector<double> quantiles(std::span<const double> series,
                              std::span<const double> qs);

// Load-weighted all-country aggregate: summed loads, generation shapes summed
// after normalizing each country's shape to its mean load.
CountrySeries aggregate_series(const std::vector<CountrySeries>& all,
                               const std::string& id = "EU");

}  // namespace gridflow
