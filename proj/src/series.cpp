// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.

#include "series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace gridflow {

void validate(const CountrySeries& cs) {
  if (cs.load.empty()) throw InvalidInput("empty series for " + cs.id);
  if (cs.wind_raw.size() != cs.load.size() ||
      cs.solar_raw.size() != cs.load.size())
    throw InvalidInput("series length mismatch for " + cs.id);
  double wsum = 0, ssum = 0;
  for (size_t t = 0; t < cs.load.size(); ++t) {
    if (!(cs.load[t] > 0))
      throw InvalidInput("non-positive load for " + cs.id + " at hour " +
                         std::to_string(t));
    if (cs.wind_raw[t] < 0 || cs.solar_raw[t] < 0)
      throw InvalidInput("negative generation shape for " + cs.id);
    wsum += cs.wind_raw[t];
    ssum += cs.solar_raw[t];
  }
  if (!(wsum > 0)) throw InvalidInput("zero-mean wind series for " + cs.id);
  if (!(ssum > 0)) throw InvalidInput("zero-mean solar series for " + cs.id);
}

MismatchSeries mismatch(const CountrySeries& cs, double gamma, double alpha_w) {
  validate(cs);
  if (alpha_w < 0 || alpha_w > 1) throw InvalidInput("alpha_w outside [0,1]");
  if (gamma < 0) throw InvalidInput("negative gamma");
  const double wmean = mean(cs.wind_raw);
  const double smean = mean(cs.solar_raw);
  const double lmean = mean(cs.load);
  MismatchSeries ms;
  ms.id = cs.id;
  ms.delta.resize(cs.load.size());
  for (size_t t = 0; t < cs.load.size(); ++t) {
    const double gen = alpha_w * cs.wind_raw[t] / wmean +
                       (1.0 - alpha_w) * cs.solar_raw[t] / smean;
    ms.delta[t] = gamma * gen * lmean - cs.load[t];
  }
  return ms;
}

ResidualExcess residual_excess(const MismatchSeries& ms) {
  ResidualExcess re;
  re.residual.resize(ms.delta.size());
  re.excess.resize(ms.delta.size());
  for (size_t t = 0; t < ms.delta.size(); ++t) {
    re.residual[t] = std::max(-ms.delta[t], 0.0);
    re.excess[t] = std::max(ms.delta[t], 0.0);
  }
  return re;
}

MixResult optimal_mix(const CountrySeries& cs, double gamma, double grid_step) {
  if (!(grid_step > 0) || grid_step > 1)
    throw InvalidInput("invalid mix grid step");
  // The mismatch is affine in alpha, so two evaluations span the grid.
  const MismatchSeries wind_only = mismatch(cs, gamma, 1.0);
  const MismatchSeries solar_only = mismatch(cs, gamma, 0.0);
  const size_t T = cs.load.size();

  const int steps = static_cast<int>(std::lround(1.0 / grid_step));
  std::vector<double> alphas, means;
  alphas.reserve(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    const double a = std::min(1.0, k * grid_step);
    double sum = 0;
    for (size_t t = 0; t < T; ++t) {
      const double d = a * wind_only.delta[t] + (1.0 - a) * solar_only.delta[t];
      sum += std::max(-d, 0.0);
    }
    alphas.push_back(a);
    means.push_back(sum / static_cast<double>(T));
  }

  MixResult r;
  size_t best = 0;
  for (size_t k = 1; k < means.size(); ++k) {
    if (means[k] < means[best]) best = k;  // ties keep the smaller alpha
  }
  r.alpha_star = alphas[best];
  r.residual_mean = means[best];

  const double cutoff = means[best] * (1.0 + kMixBandThreshold);
  r.band_low = alphas.back();
  r.band_high = alphas.front();
  for (size_t k = 0; k < means.size(); ++k) {
    if (means[k] <= cutoff) {
      r.band_low = std::min(r.band_low, alphas[k]);
      r.band_high = std::max(r.band_high, alphas[k]);
    }
  }
  return r;
}

std::vector<double> detrend(const std::vector<double>& load,
                            const std::vector<std::pair<int, int>>& years) {
  if (years.empty()) throw InvalidInput("empty year partition");
  std::vector<double> means;
  int covered = 0;
  for (auto [b, e] : years) {
    if (b < 0 || e > static_cast<int>(load.size()) || b >= e)
      throw InvalidInput("year bucket out of range or empty");
    covered += e - b;
    double s = 0;
    for (int t = b; t < e; ++t) s += load[t];
    means.push_back(s / (e - b));
  }
  if (covered != static_cast<int>(load.size()))
    throw InvalidInput("year partition does not cover the series");
  std::vector<double> out = load;
  const double target = means.back();
  for (size_t y = 0; y < years.size(); ++y) {
    const double scale = target / means[y];
    for (int t = years[y].first; t < years[y].second; ++t) out[t] *= scale;
  }
  return out;
}

namespace {

// Deterministic standard normal stream: Box-Muller over raw mt19937_64 draws,
// independent of any library distribution implementation.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  double uniform() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }
  std::mt19937_64 rng_;
  double spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace

std::vector<CountrySeries> synth_generate(const SynthConfig& cfg,
                                          const std::vector<Node>& nodes,
                                          int hours) {
  if (hours < 24) throw InvalidInput("synthetic series needs at least 24 hours");
  if (cfg.load_seasonal < 0 || cfg.load_diurnal < 0 || cfg.load_noise < 0 ||
      cfg.wind_seasonal < 0 || cfg.solar_seasonal < 0 ||
      cfg.noise_amplitude < 0)
    throw InvalidInput("negative amplitude in synthetic config");
  if (cfg.noise_persistence < 0 || cfg.noise_persistence >= 1)
    throw InvalidInput("noise persistence outside [0,1)");
  if (cfg.regional_weight < 0 || cfg.regional_weight > 1)
    throw InvalidInput("regional weight outside [0,1]");
  if (cfg.sunrise_hour < 0 || cfg.sunset_hour > 24 ||
      cfg.sunrise_hour >= cfg.sunset_hour)
    throw InvalidInput("invalid sunrise/sunset hours");

  const double phi = cfg.noise_persistence;
  const double innov = std::sqrt(1.0 - phi * phi);
  const double two_pi = 2.0 * std::numbers::pi;

  // Shared European weather noise, identical for every node.
  std::vector<double> shared(hours);
  {
    NormalStream rng(cfg.seed);
    double x = 0;
    for (int t = 0; t < hours; ++t) {
      x = phi * x + innov * rng.next();
      shared[t] = x;
    }
  }

  std::vector<CountrySeries> out;
  out.reserve(nodes.size());
  for (size_t n = 0; n < nodes.size(); ++n) {
    NormalStream rng(cfg.seed * 0x9e3779b97f4a7c15ULL + n + 1);
    CountrySeries cs;
    cs.id = nodes[n].id;
    cs.load.resize(hours);
    cs.wind_raw.resize(hours);
    cs.solar_raw.resize(hours);
    // Stagger the diurnal peak a little across nodes.
    const double peak_shift = static_cast<double>(n % 5) - 2.0;
    double xw = 0, xl = 0;
    for (int t = 0; t < hours; ++t) {
      const int hour_of_day = t % 24;
      const double season = std::cos(two_pi * (t % kHoursPerYear) /
                                     static_cast<double>(kHoursPerYear));
      const double diurnal =
          std::cos(two_pi * (hour_of_day - 18 - peak_shift) / 24.0);

      xw = phi * xw + innov * rng.next();
      xl = phi * xl + innov * rng.next();
      const double wind_noise = cfg.regional_weight * shared[t] +
                                (1.0 - cfg.regional_weight) * xw;

      cs.wind_raw[t] = std::max(
          0.0, 1.0 + cfg.wind_seasonal * season +
                   cfg.noise_amplitude * wind_noise);

      double solar = 0.0;
      if (hour_of_day >= cfg.sunrise_hour && hour_of_day < cfg.sunset_hour) {
        const double day_pos =
            static_cast<double>(hour_of_day - cfg.sunrise_hour) /
            static_cast<double>(cfg.sunset_hour - cfg.sunrise_hour);
        const double bell = std::sin(std::numbers::pi * day_pos);
        solar = bell * std::max(0.0, 1.0 - cfg.solar_seasonal * season) *
                std::max(0.2, 1.0 + 0.3 * cfg.noise_amplitude * xw);
      }
      cs.solar_raw[t] = solar;

      const double load_shape = 1.0 + cfg.load_seasonal * season +
                                cfg.load_diurnal * diurnal +
                                cfg.load_noise * xl;
      cs.load[t] = nodes[n].mean_load * std::max(0.05, load_shape);
    }
    validate(cs);
    out.push_back(std::move(cs));
  }
  return out;
}

double quantile(std::span<const double> series, double q) {
  std::vector<double> s(series.begin(), series.end());
  std::sort(s.begin(), s.end());
  return quantile_sorted(s, q);
}

std::vector<double> quantiles(std::span<const double> series,
                              std::span<const double> qs) {
  std::vector<double> s(series.begin(), series.end());
  std::sort(s.begin(), s.end());
  std::vector<double> out;
  out.reserve(qs.size());
  for (double q : qs) out.push_back(quantile_sorted(s, q));
  return out;
}

CountrySeries aggregate_series(const std::vector<CountrySeries>& all,
                               const std::string& id) {
  if (all.empty()) throw InvalidInput("no series to aggregate");
  const size_t T = all.front().load.size();
  CountrySeries agg;
  agg.id = id;
  agg.load.assign(T, 0.0);
  agg.wind_raw.assign(T, 0.0);
  agg.solar_raw.assign(T, 0.0);
  for (const auto& cs : all) {
    validate(cs);
    if (cs.load.size() != T) throw InvalidInput("series length mismatch");
    const double lmean = mean(cs.load);
    const double wmean = mean(cs.wind_raw);
    const double smean = mean(cs.solar_raw);
    for (size_t t = 0; t < T; ++t) {
      agg.load[t] += cs.load[t];
      agg.wind_raw[t] += lmean * cs.wind_raw[t] / wmean;
      agg.solar_raw[t] += lmean * cs.solar_raw[t] / smean;
    }
  }
  return agg;
}

}  // namespace gridflow
