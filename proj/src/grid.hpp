// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"

namespace gridflow {

struct Node {
  std::string id;         // ISO-2 country code
  double mean_load = 0;   // GW
  double gamma = 1.0;     // VRES penetration
  double alpha_w = 0.7;   // wind share of the VRES mix, in [0,1]
};

// Directed link between two node indices. The direction fixes the sign
// convention of the flow variable and of the incidence column.
struct Link {
  int id = 0;
  int from = 0;
  int to = 0;
};

// Immutable network topology: ordered nodes, ordered links and the
// node-by-link incidence matrix (+1 at `from`, -1 at `to`).
class Topology {
 public:
  Topology(std::vector<Node> nodes, std::vector<Link> links);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const Eigen::MatrixXd& incidence() const { return incidence_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int link_count() const { return static_cast<int>(links_.size()); }

  // Index of a node by ISO code, -1 if absent.
  int node_index(const std::string& iso) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  Eigen::MatrixXd incidence_;
};

// Directed transfer limits per link, both stored as non-negative magnitudes.
// The flow constraint is -backward[l] <= F_l <= +forward[l]; infinity marks
// an unconstrained direction.
struct CapacityLayout {
  std::vector<double> forward;
  std::vector<double> backward;

  int link_count() const { return static_cast<int>(forward.size()); }
  static CapacityLayout zero(int links);
  static CapacityLayout unbounded(int links);
};

// Per-link signed flow samples from an unconstrained run, kept sorted so
// that empirical quantiles are cheap.
class FlowQuantileTable {
 public:
  explicit FlowQuantileTable(std::vector<std::vector<double>> flows);

  int link_count() const { return static_cast<int>(sorted_.size()); }
  double quantile(int link, double q) const;
  const std::vector<double>& sorted(int link) const { return sorted_[link]; }

 private:
  std::vector<std::vector<double>> sorted_;
};

// Sum over links of the larger directed capacity. Errors out if a link is
// unconstrained in both directions; a single infinite direction falls back
// to the finite one.
double total_capacity(const CapacityLayout& layout);

// Interpolation family A: per direction min(a * present, q99).
CapacityLayout upscale_present(const CapacityLayout& present,
                               const CapacityLayout& q99, double a);

// Interpolation family B: per direction b * q99, with b in [0,1].
CapacityLayout scale_layout(const CapacityLayout& q99, double b);

// Interpolation family C: caps from the c% / (100-c)% quantiles of the
// signed flow series, negative values clipped to zero. c in [50,100].
CapacityLayout quantile_capacity_layout(const FlowQuantileTable& flows, double c);

}  // namespace gridflow
