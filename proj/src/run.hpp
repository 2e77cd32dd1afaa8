// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "dispatch.hpp"
#include "grid.hpp"
#include "metrics.hpp"
#include "series.hpp"

namespace gridflow {

// Resolved command configuration. Exactly one series source must be set:
// a series CSV path or a synthetic seed >= 0.
struct RunConfig {
  std::string topology_path;
  std::string nodes_path;
  std::string layout_path;
  std::string series_path;
  std::string synth_config_path;  // optional JSON overriding SynthConfig
  long long synth_seed = -1;
  int synth_hours = 8760;
  double gamma = 1.0;
  std::string alpha = "optimal";  // "optimal" or a fixed value in [0,1]
  double eps = -1;                // <0 selects the per-hour default
  int threads = 0;                // <=0 selects hardware parallelism
  std::string out_dir = ".";
  std::string present_layout_path;  // family-A sweeps
  std::string q99_layout_path;      // family-A/B sweeps
  std::string flows_path;           // stored unconstrained flows
  std::string layout_name = "layout";
};

struct LoadedInputs {
  Topology topo;
  std::vector<CountrySeries> series;
  std::vector<MismatchSeries> mismatches;
  std::vector<double> alphas;  // per-node mixing parameter actually used
};

LoadedInputs load_inputs(const RunConfig& cfg);

void cmd_mix(const RunConfig& cfg);
void cmd_dispatch(const RunConfig& cfg);
void cmd_sweep(const RunConfig& cfg, char family, std::span<const double> params);
void cmd_quantile_layout(const RunConfig& cfg, double c);
void cmd_report(const RunConfig& cfg, const std::vector<std::string>& result_dirs);
void cmd_synth(const RunConfig& cfg);

constexpr const char* kVersion = "0.1.0";

}  // namespace gridflow
