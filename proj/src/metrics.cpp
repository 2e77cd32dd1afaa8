// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.

#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace gridflow {

double balancing_energy(const DispatchResult& result) {
  if (result.hours.empty()) throw InvalidInput("empty dispatch result");
  const auto T = static_cast<double>(result.hours.size());
  double sum = 0;
  for (const auto& h : result.hours) sum += h.balancing.sum();
  return gw_to_twh_per_year(sum / T);
}

double benefit(double e_b_zero, double e_b_layout, double e_b_unconstrained) {
  if (e_b_unconstrained > e_b_zero)
    throw InvalidInput("unconstrained balancing energy above the zero-layout value");
  const double denom = e_b_zero - e_b_unconstrained;
  if (denom <= 0)
    throw InvalidInput("benefit undefined: zero and unconstrained balancing coincide");
  return (e_b_zero - e_b_layout) / denom;
}

FlowQuantileTable flow_table(const DispatchResult& run) {
  if (run.hours.empty()) throw InvalidInput("empty dispatch result");
  if (!run.unconstrained)
    throw InvalidInput("flow quantiles require an unconstrained run");
  const int L = static_cast<int>(run.hours.front().flows.size());
  std::vector<std::vector<double>> flows(L);
  for (auto& f : flows) f.reserve(run.hours.size());
  for (const auto& h : run.hours) {
    for (int l = 0; l < L; ++l) flows[l].push_back(h.flows[l]);
  }
  return FlowQuantileTable(std::move(flows));
}

CapacityLayout flow_quantile_layout(const DispatchResult& run, double c) {
  return quantile_capacity_layout(flow_table(run), c);
}

std::vector<SweepPoint> sweep(char family, std::span<const double> params,
                              const SweepInputs& in) {
  if (!in.topo || !in.mismatches)
    throw InvalidInput("sweep needs a topology and mismatch series");
  for (size_t k = 1; k < params.size(); ++k) {
    if (params[k] <= params[k - 1])
      throw InvalidInput("sweep parameters must be strictly increasing");
  }
  const double e_zero = zero_balancing(*in.mismatches);
  const double e_unc = unconstrained_balancing(*in.mismatches);

  std::vector<SweepPoint> out;
  out.reserve(params.size());
  for (double param : params) {
    CapacityLayout layout;
    switch (family) {
      case 'A':
        if (!in.present || !in.q99)
          throw InvalidInput("family A sweep needs present and q99 layouts");
        layout = upscale_present(*in.present, *in.q99, param);
        break;
      case 'B':
        if (!in.q99) throw InvalidInput("family B sweep needs the q99 layout");
        layout = scale_layout(*in.q99, param);
        break;
      case 'C':
        if (!in.flows)
          throw InvalidInput("family C sweep needs unconstrained flow samples");
        layout = quantile_capacity_layout(*in.flows, param);
        break;
      default:
        throw InvalidInput("unknown sweep family");
    }
    SweepPoint pt;
    pt.param = param;
    try {
      pt.total_capacity = total_capacity(layout);
      DispatchResult run =
          dispatch_series(*in.mismatches, *in.topo, layout, in.eps, in.threads);
      pt.e_b = balancing_energy(run);
      pt.beta = benefit(e_zero, pt.e_b, e_unc);
    } catch (const std::exception& e) {
      throw SolverError("sweep point " + std::to_string(param) +
                        " failed: " + e.what());
    }
    out.push_back(pt);
  }
  return out;
}

std::vector<CountryRow> country_report(const DispatchResult& result,
                                       const std::vector<MismatchSeries>& ms,
                                       const std::vector<Node>& nodes) {
  const size_t N = nodes.size();
  if (ms.size() != N || result.hours.empty() ||
      static_cast<size_t>(result.hours.front().balancing.size()) != N)
    throw InvalidInput("country report inputs have inconsistent node sets");
  const size_t T = result.hours.size();
  for (const auto& s : ms) {
    if (s.delta.size() != T)
      throw InvalidInput("mismatch series length does not match the run");
  }

  std::vector<CountryRow> rows(N);
  std::vector<double> post(T);
  for (size_t n = 0; n < N; ++n) {
    CountryRow& r = rows[n];
    r.id = nodes[n].id;
    double b_sum = 0, c_sum = 0, residual_zero = 0;
    for (size_t t = 0; t < T; ++t) {
      const auto& h = result.hours[t];
      b_sum += h.balancing[n];
      c_sum += h.curtailment[n];
      post[t] = h.curtailment[n] - h.balancing[n];
      residual_zero += std::max(-ms[n].delta[t], 0.0);
    }
    const double lmean = nodes[n].mean_load;
    r.residual_norm = b_sum / static_cast<double>(T) / lmean;
    r.excess_norm = c_sum / static_cast<double>(T) / lmean;
    std::sort(post.begin(), post.end());
    r.q01 = quantile_sorted(post, 0.01);
    r.q10 = quantile_sorted(post, 0.10);
    r.q90 = quantile_sorted(post, 0.90);
    r.q99 = quantile_sorted(post, 0.99);
    r.import_share = (residual_zero > 0) ? 1.0 - b_sum / residual_zero : 0.0;
  }
  return rows;
}

Histogram mismatch_histogram(std::span<const double> series, double bin_width,
                             double normalize_by, bool exclude_zeros) {
  if (!(bin_width > 0)) throw InvalidInput("histogram bin width must be positive");
  const double scale = (normalize_by > 0) ? 1.0 / normalize_by : 1.0;
  std::map<long long, long long> bins;
  long long total = 0;
  for (double v : series) {
    if (exclude_zeros && v == 0.0) continue;
    const double x = v * scale;
    const auto idx = static_cast<long long>(std::floor(x / bin_width));
    ++bins[idx];
    ++total;
  }
  Histogram h;
  h.bin_width = bin_width;
  h.total = total;
  if (bins.empty()) return h;
  // Emit the contiguous range so plots get explicit zero bins.
  const long long lo = bins.begin()->first;
  const long long hi = bins.rbegin()->first;
  for (long long i = lo; i <= hi; ++i) {
    h.centers.push_back((static_cast<double>(i) + 0.5) * bin_width);
    auto it = bins.find(i);
    h.counts.push_back(it == bins.end() ? 0 : it->second);
  }
  return h;
}

}  // namespace gridflow
