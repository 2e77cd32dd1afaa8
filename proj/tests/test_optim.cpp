// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "doctest.h"
#include "optim.hpp"

using namespace gridflow;

namespace {

// Brute-force LP oracle: with a bounded feasible box the optimum sits at a
// vertex, i.e. an intersection of n active constraints drawn from the rows
// and the bounds. Enumerate all n-subsets, solve, keep the best feasible one.
double lp_vertex_oracle(const BoundedLp& p, double feas_tol = 1e-8) {
  const int n = static_cast<int>(p.cost.size());
  const int m = static_cast<int>(p.rhs.size());

  // Constraint list as a_i . x = b_i candidates.
  std::vector<Eigen::VectorXd> a;
  std::vector<double> b;
  for (int i = 0; i < m; ++i) {
    a.push_back(p.rows.row(i).transpose());
    b.push_back(p.rhs[i]);
  }
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = 1.0;
    a.push_back(e);
    b.push_back(p.lower[j]);
    a.push_back(e);
    b.push_back(p.upper[j]);
  }
  const int total = static_cast<int>(a.size());

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(n);
  // Enumerate n-combinations of constraint indices.
  std::function<void(int, int)> rec = [&](int start, int k) {
    if (k == n) {
      Eigen::MatrixXd M(n, n);
      Eigen::VectorXd r(n);
      for (int k2 = 0; k2 < n; ++k2) {
        M.row(k2) = a[idx[k2]].transpose();
        r[k2] = b[idx[k2]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
      if (!lu.isInvertible()) return;
      Eigen::VectorXd x = lu.solve(r);
      for (int j = 0; j < n; ++j) {
        if (x[j] < p.lower[j] - feas_tol || x[j] > p.upper[j] + feas_tol)
          return;
      }
      for (int i = 0; i < m; ++i) {
        if (p.rows.row(i).dot(x) > p.rhs[i] + feas_tol) return;
      }
      best = std::min(best, p.cost.dot(x));
      return;
    }
    for (int i = start; i < total; ++i) {
      idx[k] = i;
      rec(i + 1, k + 1);
    }
  };
  rec(0, 0);
  return best;
}

// Augmented-Lagrangian QP oracle: strongly convex separable objective over a
// box with row constraints, inner projected-gradient loop, outer multiplier
// updates. Independent of the interior-point solver under test.
Eigen::VectorXd qp_al_oracle(const BoxQp& p) {
  const int n = static_cast<int>(p.cost.size());
  const int m = static_cast<int>(p.rhs.size());
  const double rho = 200.0;
  Eigen::VectorXd x(n);
  for (int j = 0; j < n; ++j)
    x[j] = 0.5 * (std::max(p.lower[j], -10.0) + std::min(p.upper[j], 10.0));
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(m);
  const double row_norm2 = m > 0 ? p.rows.squaredNorm() : 0.0;
  const double lip = 2.0 * p.quad.maxCoeff() + rho * row_norm2 + 1.0;
  const double step = 1.0 / lip;
  for (int outer = 0; outer < 80; ++outer) {
    for (int inner = 0; inner < 4000; ++inner) {
      Eigen::VectorXd g = 2.0 * p.quad.cwiseProduct(x) + p.cost;
      if (m > 0) {
        Eigen::VectorXd v = lam + rho * (p.rows * x - p.rhs);
        for (int i = 0; i < m; ++i) v[i] = std::max(v[i], 0.0);
        g += p.rows.transpose() * v;
      }
      Eigen::VectorXd xn = x - step * g;
      for (int j = 0; j < n; ++j)
        xn[j] = std::clamp(xn[j], p.lower[j], p.upper[j]);
      if ((xn - x).lpNorm<Eigen::Infinity>() < 1e-12) {
        x = xn;
        break;
      }
      x = xn;
    }
    if (m > 0) {
      Eigen::VectorXd v = lam + rho * (p.rows * x - p.rhs);
      for (int i = 0; i < m; ++i) lam[i] = std::max(v[i], 0.0);
    }
  }
  return x;
}

}  // namespace

TEST_CASE("lp solves a textbook instance") {
  // max x + y s.t. x + 2y <= 4, 3x + y <= 6, x,y >= 0 -> (1.6, 1.2), obj 2.8.
  BoundedLp p;
  p.cost = Eigen::Vector2d(-1.0, -1.0);
  p.lower = Eigen::Vector2d(0.0, 0.0);
  p.upper = Eigen::Vector2d(kInf, kInf);
  p.rows.resize(2, 2);
  p.rows << 1, 2, 3, 1;
  p.rhs = Eigen::Vector2d(4.0, 6.0);
  SolveReport r = solve_lp(p);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(-2.8));
  CHECK(r.x[0] == doctest::Approx(1.6));
  CHECK(r.x[1] == doctest::Approx(1.2));
}

TEST_CASE("lp detects infeasibility and unboundedness") {
  BoundedLp p;
  p.cost = Eigen::VectorXd::Ones(1);
  p.lower = Eigen::VectorXd::Zero(1);
  p.upper = Eigen::VectorXd::Constant(1, 1.0);
  p.rows.resize(1, 1);
  p.rows << 1;
  p.rhs = Eigen::VectorXd::Constant(1, -1.0);  // x <= -1 vs x >= 0
  CHECK(solve_lp(p).status == SolveStatus::Infeasible);

  BoundedLp u;
  u.cost = Eigen::VectorXd::Constant(1, -1.0);
  u.lower = Eigen::VectorXd::Zero(1);
  u.upper = Eigen::VectorXd::Constant(1, kInf);
  u.rows.resize(0, 1);
  u.rhs.resize(0);
  CHECK(solve_lp(u).status == SolveStatus::Unbounded);
}

TEST_CASE("lp matches a vertex-enumeration oracle on random instances") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 2);  // 2 or 3 variables
    const int m = 1 + static_cast<int>(rng() % 3);  // 1..3 rows
    BoundedLp p;
    p.cost.resize(n);
    p.lower.resize(n);
    p.upper.resize(n);
    for (int j = 0; j < n; ++j) {
      p.cost[j] = unif(rng);
      p.lower[j] = -2.0 + unif(rng);
      p.upper[j] = 2.0 + unif(rng);
    }
    // Interior point x0 keeps the instance feasible by construction.
    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j)
      x0[j] = 0.5 * (p.lower[j] + p.upper[j]) +
              0.25 * (p.upper[j] - p.lower[j]) * unif(rng);
    p.rows.resize(m, n);
    p.rhs.resize(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) p.rows(i, j) = unif(rng);
      p.rhs[i] = p.rows.row(i).dot(x0) + 0.1 + std::abs(unif(rng));
    }
    SolveReport r = solve_lp(p);
    REQUIRE(r.status == SolveStatus::Optimal);
    const double oracle = lp_vertex_oracle(p);
    CHECK(r.objective == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(r.max_violation <= 1e-7);
  }
}

TEST_CASE("qp solves hand-checked instances") {
  // min x^2 s.t. x >= 1 -> x = 1.
  BoxQp a;
  a.quad = Eigen::VectorXd::Ones(1);
  a.cost = Eigen::VectorXd::Zero(1);
  a.lower = Eigen::VectorXd::Ones(1);
  a.upper = Eigen::VectorXd::Constant(1, kInf);
  a.rows.resize(0, 1);
  a.rhs.resize(0);
  SolveReport ra = solve_qp(a);
  REQUIRE(ra.status == SolveStatus::Optimal);
  CHECK(ra.x[0] == doctest::Approx(1.0).epsilon(1e-6));

  // min x^2 + y^2 s.t. x + y >= 2 (as -x - y <= -2) -> (1, 1).
  BoxQp b;
  b.quad = Eigen::VectorXd::Ones(2);
  b.cost = Eigen::VectorXd::Zero(2);
  b.lower = Eigen::VectorXd::Constant(2, -kInf);
  b.upper = Eigen::VectorXd::Constant(2, kInf);
  b.rows.resize(1, 2);
  b.rows << -1, -1;
  b.rhs = Eigen::VectorXd::Constant(1, -2.0);
  SolveReport rb = solve_qp(b);
  REQUIRE(rb.status == SolveStatus::Optimal);
  CHECK(rb.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rb.x[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("qp handles a linear variable with zero curvature") {
  // min F^2 s.t. F - s <= -1, s in [0, 0.5]: pushing s to 0.5 lets F reach
  // -0.5, the least-norm feasible flow.
  BoxQp p;
  p.quad.resize(2);
  p.quad << 1.0, 0.0;
  p.cost = Eigen::VectorXd::Zero(2);
  p.lower.resize(2);
  p.lower << -kInf, 0.0;
  p.upper.resize(2);
  p.upper << kInf, 0.5;
  p.rows.resize(1, 2);
  p.rows << 1, -1;
  p.rhs = Eigen::VectorXd::Constant(1, -1.0);
  SolveReport r = solve_qp(p);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(-0.5).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("qp matches an augmented-lagrangian oracle on random instances") {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);  // 2..4 variables
    const int m = 1 + static_cast<int>(rng() % 3);
    BoxQp p;
    p.quad.resize(n);
    p.cost.resize(n);
    p.lower.resize(n);
    p.upper.resize(n);
    for (int j = 0; j < n; ++j) {
      p.quad[j] = 0.5 + std::abs(unif(rng));  // strongly convex
      p.cost[j] = unif(rng);
      p.lower[j] = -2.0 + unif(rng);
      p.upper[j] = 2.0 + unif(rng);
    }
    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j)
      x0[j] = 0.5 * (p.lower[j] + p.upper[j]) +
              0.25 * (p.upper[j] - p.lower[j]) * unif(rng);
    p.rows.resize(m, n);
    p.rhs.resize(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) p.rows(i, j) = unif(rng);
      p.rhs[i] = p.rows.row(i).dot(x0) + 0.1 + std::abs(unif(rng));
    }
    SolveReport r = solve_qp(p);
    REQUIRE(r.status == SolveStatus::Optimal);
    Eigen::VectorXd xo = qp_al_oracle(p);
    const double fo =
        p.quad.dot(xo.cwiseProduct(xo)) + p.cost.dot(xo);
    CHECK(r.objective <= fo + 1e-5);
    CHECK((r.x - xo).lpNorm<Eigen::Infinity>() <= 1e-4);
    CHECK(r.max_violation <= 1e-6);
  }
}

TEST_CASE("qp reports infeasible row systems") {
  BoxQp p;
  p.quad = Eigen::VectorXd::Ones(1);
  p.cost = Eigen::VectorXd::Zero(1);
  p.lower = Eigen::VectorXd::Zero(1);
  p.upper = Eigen::VectorXd::Ones(1);
  p.rows.resize(1, 1);
  p.rows << 1;
  p.rhs = Eigen::VectorXd::Constant(1, -1.0);
  SolveReport r = solve_qp(p);
  CHECK(r.status != SolveStatus::Optimal);
}

TEST_CASE("solvers are deterministic") {
  BoundedLp p;
  p.cost = Eigen::Vector3d(-1.0, 2.0, 0.5);
  p.lower = Eigen::Vector3d(0.0, 0.0, -1.0);
  p.upper = Eigen::Vector3d(2.0, 3.0, 1.0);
  p.rows.resize(2, 3);
  p.rows << 1, 1, 1, -1, 2, 0;
  p.rhs = Eigen::Vector2d(3.0, 1.0);
  SolveReport a = solve_lp(p);
  SolveReport b = solve_lp(p);
  REQUIRE(a.status == SolveStatus::Optimal);
  CHECK(a.objective == b.objective);
  CHECK(a.iterations == b.iterations);
  for (int j = 0; j < 3; ++j) CHECK(a.x[j] == b.x[j]);

  BoxQp q;
  q.quad = Eigen::Vector3d(1.0, 0.5, 2.0);
  q.cost = Eigen::Vector3d(0.1, -0.3, 0.2);
  q.lower = p.lower;
  q.upper = p.upper;
  q.rows = p.rows;
  q.rhs = p.rhs;
  SolveReport c = solve_qp(q);
  SolveReport d = solve_qp(q);
  REQUIRE(c.status == SolveStatus::Optimal);
  for (int j = 0; j < 3; ++j) CHECK(c.x[j] == d.x[j]);
}
