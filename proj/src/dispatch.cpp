// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.

#include "dispatch.hpp"

#include <algorithm>
#include <mutex>
#include <thread>

namespace gridflow {

double default_eps(const Eigen::VectorXd& delta) {
  double residual = 0;
  for (int n = 0; n < delta.size(); ++n)
    residual += std::max(-delta[n], 0.0);
  return std::max(1e-6 * residual, 1e-9);
}

HourlyDispatch dispatch_hour(const Eigen::VectorXd& delta, const Topology& topo,
                             const CapacityLayout& layout, double eps) {
  const int N = topo.node_count();
  const int L = topo.link_count();
  if (delta.size() != N) throw InvalidInput("mismatch vector of wrong length");
  for (int n = 0; n < N; ++n) {
    if (!is_finite(delta[n])) throw InvalidInput("non-finite mismatch value");
  }
  if (layout.link_count() != L)
    throw InvalidInput("capacity layout does not cover the topology");
  if (eps < 0) eps = default_eps(delta);

  const Eigen::MatrixXd& K = topo.incidence();

  // Variables: L flows then N balancing slacks s_n >= 0 with
  // s_n >= (K F)_n - delta_n, written as rows (K F)_n - s_n <= delta_n.
  const int nv = L + N;
  Eigen::VectorXd lower(nv), upper(nv);
  for (int l = 0; l < L; ++l) {
    if (layout.forward[l] < 0 || layout.backward[l] < 0)
      throw InvalidInput("negative capacity");
    lower[l] = -layout.backward[l];
    upper[l] = layout.forward[l];
  }
  lower.tail(N).setZero();
  upper.tail(N).setConstant(kInf);

  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(N, nv);
  rows.leftCols(L) = K;
  rows.rightCols(N) = -Eigen::MatrixXd::Identity(N, N);

  BoundedLp lp;
  lp.cost = Eigen::VectorXd::Zero(nv);
  lp.cost.tail(N).setOnes();
  lp.lower = lower;
  lp.upper = upper;
  lp.rows = rows;
  lp.rhs = delta;

  SolveReport step1 = solve_lp(lp);
  if (step1.status != SolveStatus::Optimal)
    throw SolverError("balancing LP failed (status " +
                      std::to_string(static_cast<int>(step1.status)) + ")");
  const double b_min = step1.objective;

  // The slack columns are rescaled by the balancing budget so the budget row
  // reads sum(s') <= 1; without this the row is badly equilibrated against
  // the O(delta) node rows whenever b_min is near zero.
  const double sigma = b_min + eps;
  BoxQp qp;
  qp.quad = Eigen::VectorXd::Zero(nv);
  qp.quad.head(L).setOnes();
  qp.cost = Eigen::VectorXd::Zero(nv);
  qp.lower = lower;
  qp.upper = upper;
  qp.rows.resize(N + 1, nv);
  qp.rows.topRows(N) = rows;
  qp.rows.topRightCorner(N, N) *= sigma;
  qp.rows.row(N).setZero();
  qp.rows.row(N).tail(N).setOnes();
  qp.rhs.resize(N + 1);
  qp.rhs.head(N) = delta;
  qp.rhs[N] = 1.0;

  SolveReport step2 = solve_qp(qp);
  if (step2.status != SolveStatus::Optimal)
    throw SolverError("flow QP failed (status " +
                      std::to_string(static_cast<int>(step2.status)) + ")");

  HourlyDispatch hd;
  hd.b_min = b_min;
  hd.flows = step2.x.head(L);
  // Snap tiny interior-point slack off the box so the bound invariant holds
  // exactly; balancing and curtailment are then recovered pointwise.
  for (int l = 0; l < L; ++l)
    hd.flows[l] = std::clamp(hd.flows[l], lower[l], upper[l]);
  Eigen::VectorXd net = K * hd.flows;
  hd.balancing.resize(N);
  hd.curtailment.resize(N);
  for (int n = 0; n < N; ++n) {
    const double post = delta[n] - net[n];
    hd.balancing[n] = std::max(-post, 0.0);
    hd.curtailment[n] = std::max(post, 0.0);
  }
  return hd;
}

std::vector<Eigen::VectorXd> stack_hours(
    const std::vector<MismatchSeries>& ms) {
  if (ms.empty()) throw InvalidInput("no mismatch series");
  const size_t T = ms.front().delta.size();
  for (const auto& s : ms) {
    if (s.delta.size() != T)
      throw InvalidInput("mismatch series length mismatch");
  }
  std::vector<Eigen::VectorXd> hours(T, Eigen::VectorXd(ms.size()));
  for (size_t t = 0; t < T; ++t) {
    for (size_t n = 0; n < ms.size(); ++n) hours[t][n] = ms[n].delta[t];
  }
  return hours;
}

DispatchResult dispatch_series(const std::vector<MismatchSeries>& ms,
                               const Topology& topo,
                               const CapacityLayout& layout, double eps,
                               int threads) {
  if (static_cast<int>(ms.size()) != topo.node_count())
    throw InvalidInput("mismatch series do not match the topology nodes");
  for (int n = 0; n < topo.node_count(); ++n) {
    if (ms[n].id != topo.nodes()[n].id)
      throw InvalidInput("mismatch series order does not match node order");
  }
  std::vector<Eigen::VectorXd> hours = stack_hours(ms);
  const size_t T = hours.size();

  DispatchResult res;
  res.layout = layout;
  res.eps = eps;
  res.hours.resize(T);
  res.unconstrained = true;
  for (int l = 0; l < layout.link_count(); ++l) {
    if (is_finite(layout.forward[l]) || is_finite(layout.backward[l]))
      res.unconstrained = false;
  }

  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(T)));

  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto worker = [&](size_t begin, size_t end) {
    try {
      for (size_t t = begin; t < end; ++t)
        res.hours[t] = dispatch_hour(hours[t], topo, layout, eps);
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  if (threads == 1) {
    worker(0, T);
  } else {
    std::vector<std::thread> pool;
    const size_t chunk = (T + threads - 1) / threads;
    for (int k = 0; k < threads; ++k) {
      const size_t b = k * chunk;
      const size_t e = std::min(T, b + chunk);
      if (b < e) pool.emplace_back(worker, b, e);
    }
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return res;
}

double unconstrained_balancing(const std::vector<MismatchSeries>& ms) {
  if (ms.empty() || ms.front().delta.empty())
    throw InvalidInput("empty mismatch series");
  const size_t T = ms.front().delta.size();
  double sum = 0;
  for (size_t t = 0; t < T; ++t) {
    double total = 0;
    for (const auto& s : ms) {
      if (s.delta.size() != T)
        throw InvalidInput("mismatch series length mismatch");
      total += s.delta[t];
    }
    sum += std::max(-total, 0.0);
  }
  return gw_to_twh_per_year(sum / static_cast<double>(T));
}

double zero_balancing(const std::vector<MismatchSeries>& ms) {
  if (ms.empty() || ms.front().delta.empty())
    throw InvalidInput("empty mismatch series");
  const size_t T = ms.front().delta.size();
  double sum = 0;
  for (const auto& s : ms) {
    if (s.delta.size() != T)
      throw InvalidInput("mismatch series length mismatch");
    for (double d : s.delta) sum += std::max(-d, 0.0);
  }
  return gw_to_twh_per_year(sum / static_cast<double>(T));
}

}  // namespace gridflow
