// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.
//
// Command-line front end. Talks to the shared library exclusively through
// the public C interface; exit code mirrors gf_status.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gridflow.h"

namespace {

struct CliOptions {
  std::string topology;
  std::string nodes;
  std::string layout;
  std::string series;
  std::string synth_config;
  long long synth_seed = -1;
  int synth_hours = 8760;
  double gamma = 1.0;
  std::string alpha = "optimal";
  double eps = -1;
  int threads = 0;
  std::string out_dir = ".";
  std::string present_layout;
  std::string q99_layout;
  std::string flows;
  std::string layout_name = "layout";
};

const char* opt_str(const std::string& s) {
  return s.empty() ? nullptr : s.c_str();
}

gf_run_options to_run_options(const CliOptions& o) {
  gf_run_options r;
  gf_run_options_init(&r);
  r.topology = opt_str(o.topology);
  r.nodes = opt_str(o.nodes);
  r.layout = opt_str(o.layout);
  r.series = opt_str(o.series);
  r.synth_config = opt_str(o.synth_config);
  r.synth_seed = o.synth_seed;
  r.synth_hours = o.synth_hours;
  r.gamma = o.gamma;
  r.alpha = o.alpha.c_str();
  r.eps = o.eps;
  r.threads = o.threads;
  r.out_dir = o.out_dir.c_str();
  r.present_layout = opt_str(o.present_layout);
  r.q99_layout = opt_str(o.q99_layout);
  r.flows = opt_str(o.flows);
  r.layout_name = o.layout_name.c_str();
  return r;
}

void add_common_options(CLI::App* cmd, CliOptions& o, bool needs_series) {
  cmd->add_option("--topology", o.topology, "Link list CSV")->required();
  cmd->add_option("--nodes", o.nodes, "Mean load CSV")->required();
  cmd->add_option("--out", o.out_dir, "Output directory");
  if (needs_series) {
    cmd->add_option("--series", o.series, "Hourly series CSV");
    cmd->add_option("--synth-seed", o.synth_seed,
                    "Generate a synthetic series with this seed");
    cmd->add_option("--synth-config", o.synth_config,
                    "Synthetic generator parameters (JSON)");
    cmd->add_option("--synth-hours", o.synth_hours,
                    "Length of the synthetic series");
    cmd->add_option("--gamma", o.gamma, "Renewable penetration");
    cmd->add_option("--alpha", o.alpha,
                    "Wind fraction of the mix, or 'optimal'");
  }
}

void add_solver_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--eps", o.eps, "Step-2 balancing tolerance (GW)");
  cmd->add_option("--threads", o.threads, "Worker threads, 0 = auto");
}

int report_status(gf_status st) {
  if (st == GF_OK) return 0;
  std::fprintf(stderr, "error: %s\n", gf_last_error());
  return static_cast<int>(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dispatch simulation for renewable power networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gf_version());

  CliOptions o;

  auto* mix = app.add_subcommand(
      "mix", "Optimal wind/solar mixes per country");
  add_common_options(mix, o, true);

  auto* dispatch = app.add_subcommand(
      "dispatch", "Constrained flow dispatch over a full series");
  add_common_options(dispatch, o, true);
  add_solver_options(dispatch, o);
  dispatch->add_option("--layout", o.layout, "Capacity layout CSV")
      ->required();
  dispatch->add_option("--layout-name", o.layout_name,
                       "Label used in the output files");

  auto* sweep = app.add_subcommand(
      "sweep", "Balancing energy along a capacity interpolation");
  add_common_options(sweep, o, true);
  add_solver_options(sweep, o);
  std::string family = "B";
  std::vector<double> params;
  sweep->add_option("--family", family, "Interpolation family: A, B or C")
      ->required();
  sweep->add_option("--params", params, "Interpolation parameters, increasing")
      ->required();
  sweep->add_option("--present-layout", o.present_layout,
                    "Present-day layout CSV (family A)");
  sweep->add_option("--q99-layout", o.q99_layout,
                    "99% quantile layout CSV (families A and B)");
  sweep->add_option("--flows", o.flows,
                    "Stored unconstrained flows CSV (family C)");

  auto* qlayout = app.add_subcommand(
      "quantile-layout", "Capacity layout from unconstrained flow quantiles");
  add_common_options(qlayout, o, true);
  add_solver_options(qlayout, o);
  double quantile_pct = 99.0;
  qlayout->add_option("--c", quantile_pct, "Quantile in percent, [50,100]");
  qlayout->add_option("--flows", o.flows, "Stored unconstrained flows CSV");

  auto* report = app.add_subcommand(
      "report", "Country statistics from stored dispatch runs");
  add_common_options(report, o, true);
  std::vector<std::string> result_dirs;
  report->add_option("--results", result_dirs,
                     "Directories of stored dispatch runs")
      ->required();

  auto* synth = app.add_subcommand(
      "synth", "Write a deterministic synthetic series");
  add_common_options(synth, o, false);
  synth->add_option("--synth-seed", o.synth_seed, "Generator seed")
      ->required();
  synth->add_option("--synth-config", o.synth_config,
                    "Generator parameters (JSON)");
  synth->add_option("--synth-hours", o.synth_hours, "Series length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  gf_run_options r = to_run_options(o);

  if (mix->parsed()) return report_status(gf_cmd_mix(&r));
  if (dispatch->parsed()) return report_status(gf_cmd_dispatch(&r));
  if (sweep->parsed()) {
    if (family.size() != 1) {
      std::fprintf(stderr, "error: --family must be A, B or C\n");
      return 2;
    }
    return report_status(gf_cmd_sweep(&r, family[0], params.data(),
                                      static_cast<int>(params.size())));
  }
  if (qlayout->parsed())
    return report_status(gf_cmd_quantile_layout(&r, quantile_pct));
  if (report->parsed()) {
    std::vector<const char*> dirs;
    for (const auto& d : result_dirs) dirs.push_back(d.c_str());
    return report_status(gf_cmd_report(&r, dirs.data(),
                                       static_cast<int>(dirs.size())));
  }
  if (synth->parsed()) return report_status(gf_cmd_synth(&r));
  return 2;
}
