// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.

#include "grid.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace gridflow {

namespace {

void check_connected(int n_nodes, const std::vector<Link>& links) {
  if (n_nodes == 0) throw InvalidInput("topology has no nodes");
  std::vector<std::vector<int>> adj(n_nodes);
  for (const auto& l : links) {
    adj[l.from].push_back(l.to);
    adj[l.to].push_back(l.from);
  }
  std::vector<char> seen(n_nodes, 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  for (int v = 0; v < n_nodes; ++v) {
    if (!seen[v]) throw InvalidInput("topology graph is not connected");
  }
}

}  // namespace

Topology::Topology(std::vector<Node> nodes, std::vector<Link> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
  const int n = static_cast<int>(nodes_.size());
  const int m = static_cast<int>(links_.size());

  std::unordered_set<std::string> ids;
  for (const auto& node : nodes_) {
    if (node.id.empty()) throw InvalidInput("node with empty id");
    if (!ids.insert(node.id).second)
      throw InvalidInput("duplicate node id: " + node.id);
    if (!(node.mean_load > 0))
      throw InvalidInput("node " + node.id + " has non-positive mean load");
    if (node.alpha_w < 0 || node.alpha_w > 1)
      throw InvalidInput("node " + node.id + " has alpha_w outside [0,1]");
    if (node.gamma < 0)
      throw InvalidInput("node " + node.id + " has negative gamma");
  }

  std::unordered_set<long long> pairs;
  for (const auto& l : links_) {
    if (l.from < 0 || l.from >= n || l.to < 0 || l.to >= n)
      throw InvalidInput("link references an unknown node");
    if (l.from == l.to)
      throw InvalidInput("self-loop at node " + nodes_[l.from].id);
    long long a = std::min(l.from, l.to);
    long long b = std::max(l.from, l.to);
    if (!pairs.insert(a * n + b).second)
      throw InvalidInput("duplicate link between " + nodes_[l.from].id +
                         " and " + nodes_[l.to].id);
  }
  check_connected(n, links_);

  incidence_ = Eigen::MatrixXd::Zero(n, m);
  for (int l = 0; l < m; ++l) {
    incidence_(links_[l].from, l) = 1.0;
    incidence_(links_[l].to, l) = -1.0;
  }
}

int Topology::node_index(const std::string& iso) const {
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == iso) return static_cast<int>(i);
  }
  return -1;
}

CapacityLayout CapacityLayout::zero(int links) {
  return {std::vector<double>(links, 0.0), std::vector<double>(links, 0.0)};
}

CapacityLayout CapacityLayout::unbounded(int links) {
  return {std::vector<double>(links, kInf), std::vector<double>(links, kInf)};
}

FlowQuantileTable::FlowQuantileTable(std::vector<std::vector<double>> flows)
    : sorted_(std::move(flows)) {
  for (auto& s : sorted_) {
    if (s.empty()) throw InvalidInput("empty flow series in quantile table");
    std::sort(s.begin(), s.end());
  }
}

double FlowQuantileTable::quantile(int link, double q) const {
  return quantile_sorted(sorted_[link], q);
}

double total_capacity(const CapacityLayout& layout) {
  double total = 0.0;
  for (int l = 0; l < layout.link_count(); ++l) {
    const double f = layout.forward[l];
    const double b = layout.backward[l];
    if (f < 0 || b < 0) throw InvalidInput("negative capacity");
    if (!is_finite(f) && !is_finite(b))
      throw InvalidInput("total capacity undefined: link " + std::to_string(l) +
                         " is unconstrained in both directions");
    // NRL in a single direction: use the finite one.
    if (!is_finite(f))
      total += b;
    else if (!is_finite(b))
      total += f;
    else
      total += std::max(f, b);
  }
  return total;
}

CapacityLayout upscale_present(const CapacityLayout& present,
                               const CapacityLayout& q99, double a) {
  if (a < 0) throw InvalidInput("negative upscale factor");
  if (present.link_count() != q99.link_count())
    throw InvalidInput("layouts defined on different link sets");
  CapacityLayout out = CapacityLayout::zero(present.link_count());
  for (int l = 0; l < present.link_count(); ++l) {
    out.forward[l] = std::min(a * present.forward[l], q99.forward[l]);
    out.backward[l] = std::min(a * present.backward[l], q99.backward[l]);
  }
  return out;
}

CapacityLayout scale_layout(const CapacityLayout& q99, double b) {
  if (b < 0 || b > 1) throw InvalidInput("scale factor outside [0,1]");
  CapacityLayout out = CapacityLayout::zero(q99.link_count());
  for (int l = 0; l < q99.link_count(); ++l) {
    out.forward[l] = b * q99.forward[l];
    out.backward[l] = b * q99.backward[l];
  }
  return out;
}

CapacityLayout quantile_capacity_layout(const FlowQuantileTable& flows, double c) {
  if (c < 50.0 || c > 100.0)
    throw InvalidInput("quantile layout percentage outside [50,100]");
  CapacityLayout out = CapacityLayout::zero(flows.link_count());
  for (int l = 0; l < flows.link_count(); ++l) {
    out.forward[l] = std::max(0.0, flows.quantile(l, c / 100.0));
    out.backward[l] = std::max(0.0, -flows.quantile(l, 1.0 - c / 100.0));
  }
  return out;
}

}  // namespace gridflow
