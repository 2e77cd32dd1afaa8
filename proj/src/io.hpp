// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grid.hpp"
#include "series.hpp"

namespace gridflow {

// Fixed decimal formatting for all emitted CSVs: 6 significant digits,
// round-half-even, `inf` for infinities.
std::string fmt6(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// FNV-1a 64-bit content digest, hex-encoded; used by run manifests.
std::uint64_t fnv1a64(const std::string& bytes);
std::string digest_hex(const std::string& bytes);
std::string file_digest(const std::string& path);

struct LinkSpec {
  int id = 0;
  std::string from;
  std::string to;
};

// `link_id,from_iso,to_iso`
std::vector<LinkSpec> read_topology_csv(const std::string& path);

// `iso,mean_load_gw`
std::vector<Node> read_mean_loads_csv(const std::string& path);

// Builds a validated topology; node order follows the nodes file, link order
// the topology file.
Topology make_topology(std::vector<Node> nodes,
                       const std::vector<LinkSpec>& links);

// `from_iso,to_iso,cap_forward_gw,cap_backward_gw`, literal `inf` allowed.
// Rows may be oriented either way; both directions resolve against the
// topology's link orientation. Every link must be covered exactly once.
CapacityLayout read_layout_csv(const Topology& topo, const std::string& path);
void write_layout_csv(const Topology& topo, const CapacityLayout& layout,
                      const std::string& path);

// `hour,L_<ISO>,W_<ISO>,S_<ISO>,...`; one file carries all countries.
std::vector<CountrySeries> read_series_csv(const Topology& topo,
                                           const std::string& path);
void write_series_csv(const std::vector<CountrySeries>& series,
                      const std::string& path);

// Synthetic-generator parameters as JSON.
SynthConfig read_synth_config(const std::string& path);

// Per-hour link flow matrix, `hour,F_<from>_<to>,...`.
void write_flows_csv(const Topology& topo,
                     const std::vector<std::vector<double>>& flows_by_hour,
                     const std::string& path);
std::vector<std::vector<double>> read_flows_csv(const Topology& topo,
                                                const std::string& path);

}  // namespace gridflow
