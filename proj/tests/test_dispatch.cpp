// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "dispatch.hpp"
#include "doctest.h"

using namespace gridflow;

namespace {

Topology pair_topo() {
  return Topology({{"AA", 1.0}, {"BB", 1.0}}, {{0, 0, 1}});
}

Topology line3() {
  return Topology({{"AA", 1.0}, {"BB", 1.0}, {"CC", 1.0}},
                  {{0, 0, 1}, {1, 1, 2}});
}

CapacityLayout uniform_layout(int links, double fwd, double bwd) {
  CapacityLayout l;
  l.forward.assign(links, fwd);
  l.backward.assign(links, bwd);
  return l;
}

// Direct evaluation of the stage objectives on a candidate flow vector.
double sum_balancing(const Topology& topo, const Eigen::VectorXd& delta,
                     const Eigen::VectorXd& flows) {
  Eigen::VectorXd net = topo.incidence() * flows;
  double s = 0;
  for (int n = 0; n < delta.size(); ++n)
    s += std::max(net[n] - delta[n], 0.0);
  return s;
}

}  // namespace

TEST_CASE("surplus flows to the deficit node when capacity allows") {
  Topology topo = pair_topo();
  Eigen::Vector2d delta(2.0, -1.0);
  HourlyDispatch hd =
      dispatch_hour(delta, topo, uniform_layout(1, kInf, kInf), 0.0);
  CHECK(hd.b_min == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(hd.flows[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(hd.balancing[0] == doctest::Approx(0.0));
  CHECK(hd.balancing[1] == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(hd.curtailment[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(hd.curtailment[1] == doctest::Approx(0.0));
}

TEST_CASE("a tight link caps the exchange") {
  Topology topo = pair_topo();
  Eigen::Vector2d delta(2.0, -1.0);
  HourlyDispatch hd =
      dispatch_hour(delta, topo, uniform_layout(1, 0.5, 0.5), 0.0);
  CHECK(hd.b_min == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(hd.flows[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(hd.balancing[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(hd.curtailment[0] == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("zero capacity reduces to per-node balancing") {
  Topology topo = line3();
  Eigen::Vector3d delta(1.5, -0.4, -2.0);
  HourlyDispatch hd =
      dispatch_hour(delta, topo, uniform_layout(2, 0.0, 0.0), 0.0);
  for (int l = 0; l < 2; ++l) CHECK(hd.flows[l] == 0.0);
  for (int n = 0; n < 3; ++n) {
    CHECK(hd.balancing[n] == doctest::Approx(std::max(-delta[n], 0.0)));
    CHECK(hd.curtailment[n] == doctest::Approx(std::max(delta[n], 0.0)));
  }
}

TEST_CASE("aggregate deficit lower-bounds the balancing") {
  Topology topo = line3();
  Eigen::Vector3d delta(0.5, -1.2, 0.3);
  const double agg = std::max(-(delta.sum()), 0.0);

  HourlyDispatch tight =
      dispatch_hour(delta, topo, uniform_layout(2, 0.2, 0.2), -1.0);
  CHECK(tight.b_min >= agg - 1e-9);

  HourlyDispatch open =
      dispatch_hour(delta, topo, uniform_layout(2, kInf, kInf), -1.0);
  CHECK(open.b_min == doctest::Approx(agg).epsilon(1e-9));
}

TEST_CASE("two-step dispatch matches a grid-search oracle") {
  Topology topo = line3();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  std::uniform_real_distribution<double> capd(0.0, 1.5);
  for (int trial = 0; trial < 15; ++trial) {
    Eigen::Vector3d delta(unif(rng), unif(rng), unif(rng));
    CapacityLayout lay;
    lay.forward = {capd(rng), capd(rng)};
    lay.backward = {capd(rng), capd(rng)};
    const double eps = 1e-6;
    HourlyDispatch hd = dispatch_hour(delta, topo, lay, eps);

    // Oracle: exhaustive scan over the two flow variables.
    const double step = 0.005;
    double best_b = 1e300;
    for (double f0 = -lay.backward[0]; f0 <= lay.forward[0] + 1e-12;
         f0 += step) {
      for (double f1 = -lay.backward[1]; f1 <= lay.forward[1] + 1e-12;
           f1 += step) {
        Eigen::Vector2d f(std::min(f0, lay.forward[0]),
                          std::min(f1, lay.forward[1]));
        best_b = std::min(best_b, sum_balancing(topo, delta, f));
      }
    }
    CHECK(hd.b_min <= best_b + 1e-7);
    CHECK(hd.b_min >= best_b - 2.5 * step);

    // Among near-minimal-balancing flows the solver picks the smallest
    // square norm; the grid scan bounds it from above.
    double best_norm = 1e300;
    for (double f0 = -lay.backward[0]; f0 <= lay.forward[0] + 1e-12;
         f0 += step) {
      for (double f1 = -lay.backward[1]; f1 <= lay.forward[1] + 1e-12;
           f1 += step) {
        Eigen::Vector2d f(std::min(f0, lay.forward[0]),
                          std::min(f1, lay.forward[1]));
        if (sum_balancing(topo, delta, f) <= hd.b_min + eps)
          best_norm = std::min(best_norm, f.squaredNorm());
      }
    }
    const double solver_norm = hd.flows.squaredNorm();
    CHECK(solver_norm <= best_norm + 1e-6);
    CHECK(sum_balancing(topo, delta, hd.flows) <= hd.b_min + eps + 1e-7);

    // Bookkeeping: delta - K F = curtailment - balancing exactly.
    Eigen::VectorXd net = topo.incidence() * hd.flows;
    for (int n = 0; n < 3; ++n) {
      CHECK(delta[n] - net[n] ==
            doctest::Approx(hd.curtailment[n] - hd.balancing[n]));
      CHECK(std::min(hd.balancing[n], hd.curtailment[n]) == 0.0);
    }
  }
}

TEST_CASE("unconstrained flows carry no cycle component") {
  Topology topo({{"AA", 1.0}, {"BB", 1.0}, {"CC", 1.0}},
                {{0, 0, 1}, {1, 1, 2}, {2, 0, 2}});
  Eigen::Vector3d delta(1.0, -0.3, -0.7);
  HourlyDispatch hd =
      dispatch_hour(delta, topo, uniform_layout(3, kInf, kInf), -1.0);
  // Cycle vector of the triangle: links 0 and 1 forward, link 2 backward.
  Eigen::Vector3d cycle(1.0, 1.0, -1.0);
  CHECK(topo.incidence() * cycle == Eigen::Vector3d::Zero());
  CHECK(hd.flows.dot(cycle) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("dispatch over a series is thread-count independent") {
  Topology topo = line3();
  std::vector<MismatchSeries> ms(3);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unif(-1.5, 1.5);
  for (int n = 0; n < 3; ++n) {
    ms[n].id = topo.nodes()[n].id;
    ms[n].delta.resize(30);
    for (auto& d : ms[n].delta) d = unif(rng);
  }
  CapacityLayout lay = uniform_layout(2, 0.8, 0.8);
  DispatchResult one = dispatch_series(ms, topo, lay, 1e-6, 1);
  DispatchResult three = dispatch_series(ms, topo, lay, 1e-6, 3);
  REQUIRE(one.hours.size() == 30);
  for (size_t t = 0; t < 30; ++t) {
    for (int l = 0; l < 2; ++l)
      CHECK(one.hours[t].flows[l] == three.hours[t].flows[l]);
    for (int n = 0; n < 3; ++n)
      CHECK(one.hours[t].balancing[n] == three.hours[t].balancing[n]);
  }
}

TEST_CASE("series validation against the topology") {
  Topology topo = pair_topo();
  std::vector<MismatchSeries> ms(2);
  ms[0] = {"BB", {0.0}};
  ms[1] = {"AA", {0.0}};
  CHECK_THROWS_AS(dispatch_series(ms, topo, uniform_layout(1, 1, 1), -1, 1),
                  InvalidInput);
  ms.pop_back();
  CHECK_THROWS_AS(dispatch_series(ms, topo, uniform_layout(1, 1, 1), -1, 1),
                  InvalidInput);
}

TEST_CASE("analytic balancing references") {
  std::vector<MismatchSeries> ms(2);
  ms[0] = {"AA", {1.0, -2.0}};
  ms[1] = {"BB", {-0.5, 1.0}};
  // Zero transmission: mean of (0 + 0.5) and (2 + 0) deficits = 1.25 GW.
  CHECK(zero_balancing(ms) ==
        doctest::Approx(gw_to_twh_per_year(1.25)).epsilon(1e-12));
  // Unlimited transmission: totals 0.5 and -1, mean deficit 0.5 GW.
  CHECK(unconstrained_balancing(ms) ==
        doctest::Approx(gw_to_twh_per_year(0.5)).epsilon(1e-12));
}

TEST_CASE("default epsilon scales with the total deficit") {
  Eigen::Vector2d delta(3.0, -2.0);
  CHECK(default_eps(delta) == doctest::Approx(2e-6));
  CHECK(default_eps(Eigen::Vector2d(1.0, 2.0)) == doctest::Approx(1e-9));
}

TEST_CASE("bad inputs are rejected") {
  Topology topo = pair_topo();
  Eigen::Vector2d delta(1.0, -1.0);
  CHECK_THROWS_AS(
      dispatch_hour(Eigen::Vector3d(1, 2, 3), topo, uniform_layout(1, 1, 1), -1),
      InvalidInput);
  CHECK_THROWS_AS(dispatch_hour(delta, topo, uniform_layout(2, 1, 1), -1),
                  InvalidInput);
  CHECK_THROWS_AS(dispatch_hour(delta, topo, uniform_layout(1, -1, 1), -1),
                  InvalidInput);
  Eigen::Vector2d nan_delta(std::nan(""), 0.0);
  CHECK_THROWS_AS(dispatch_hour(nan_delta, topo, uniform_layout(1, 1, 1), -1),
                  InvalidInput);
}
