// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.

#include "run.hpp"

#include <chrono>
#include <filesystem>

#include <json.hpp>

#include "io.hpp"

namespace gridflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  long long ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

json config_echo(const RunConfig& cfg) {
  json j;
  j["topology"] = cfg.topology_path;
  j["nodes"] = cfg.nodes_path;
  if (!cfg.layout_path.empty()) j["layout"] = cfg.layout_path;
  if (!cfg.series_path.empty()) j["series"] = cfg.series_path;
  if (cfg.synth_seed >= 0) {
    j["synth_seed"] = cfg.synth_seed;
    j["synth_hours"] = cfg.synth_hours;
    if (!cfg.synth_config_path.empty())
      j["synth_config"] = cfg.synth_config_path;
  }
  j["gamma"] = cfg.gamma;
  j["alpha"] = cfg.alpha;
  j["eps"] = cfg.eps;
  j["out"] = cfg.out_dir;
  if (!cfg.present_layout_path.empty())
    j["present_layout"] = cfg.present_layout_path;
  if (!cfg.q99_layout_path.empty()) j["q99_layout"] = cfg.q99_layout_path;
  if (!cfg.flows_path.empty()) j["flows"] = cfg.flows_path;
  return j;
}

json input_digests(const RunConfig& cfg) {
  json j = json::object();
  for (const std::string& p :
       {cfg.topology_path, cfg.nodes_path, cfg.layout_path, cfg.series_path,
        cfg.synth_config_path, cfg.present_layout_path, cfg.q99_layout_path,
        cfg.flows_path}) {
    if (!p.empty()) j[p] = file_digest(p);
  }
  return j;
}

// Writes manifest_<command>.json next to the command outputs.
void write_manifest(const RunConfig& cfg, const std::string& command,
                    const std::vector<std::string>& outputs,
                    const Stopwatch& sw, json summary) {
  json m;
  m["version"] = kVersion;
  m["command"] = command;
  m["config"] = config_echo(cfg);
  m["inputs"] = input_digests(cfg);
  json out = json::object();
  for (const auto& f : outputs)
    out[fs::path(f).filename().string()] = file_digest(f);
  m["outputs"] = out;
  m["timing_ms"] = sw.ms();
  m["summary"] = std::move(summary);
  write_file((fs::path(cfg.out_dir) / ("manifest_" + command + ".json")).string(),
             m.dump(2) + "\n");
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

double parse_alpha_value(const std::string& alpha) {
  try {
    size_t pos = 0;
    const double v = std::stod(alpha, &pos);
    if (pos != alpha.size() || v < 0 || v > 1)
      throw std::invalid_argument(alpha);
    return v;
  } catch (const std::exception&) {
    throw InvalidInput("alpha must be 'optimal' or a value in [0,1], got '" +
                       alpha + "'");
  }
}

// Runs a fully unconstrained dispatch to obtain flow samples for quantile
// layouts when no stored run was supplied.
FlowQuantileTable unconstrained_flows(const LoadedInputs& in,
                                      const RunConfig& cfg) {
  DispatchResult run =
      dispatch_series(in.mismatches, in.topo,
                      CapacityLayout::unbounded(in.topo.link_count()), cfg.eps,
                      cfg.threads);
  return flow_table(run);
}

FlowQuantileTable load_or_compute_flows(const LoadedInputs& in,
                                        const RunConfig& cfg,
                                        bool* auto_ran) {
  *auto_ran = false;
  if (!cfg.flows_path.empty()) {
    auto flows = read_flows_csv(in.topo, cfg.flows_path);
    std::vector<std::vector<double>> by_link(in.topo.link_count());
    for (const auto& hour : flows) {
      for (int l = 0; l < in.topo.link_count(); ++l)
        by_link[l].push_back(hour[l]);
    }
    return FlowQuantileTable(std::move(by_link));
  }
  *auto_ran = true;
  return unconstrained_flows(in, cfg);
}

json benefit_json(const BenefitReport& rep, double annual_consumption_twh) {
  json j;
  j["layout"] = rep.layout_name;
  if (is_finite(rep.total_capacity))
    j["total_capacity_gw"] = rep.total_capacity;
  else
    j["total_capacity_gw"] = nullptr;
  j["e_b_zero_twh"] = rep.e_b_zero;
  j["e_b_layout_twh"] = rep.e_b_layout;
  j["e_b_unconstrained_twh"] = rep.e_b_unconstrained;
  j["e_b_pct_of_consumption"] =
      100.0 * rep.e_b_layout / annual_consumption_twh;
  j["beta"] = rep.beta;
  return j;
}

}  // namespace

LoadedInputs load_inputs(const RunConfig& cfg) {
  if (cfg.topology_path.empty() || cfg.nodes_path.empty())
    throw InvalidInput("a topology file and a nodes file are required");
  const bool has_series = !cfg.series_path.empty();
  const bool has_synth = cfg.synth_seed >= 0;
  if (has_series == has_synth)
    throw InvalidInput("exactly one series source: --series or --synth-seed");

  auto nodes = read_mean_loads_csv(cfg.nodes_path);
  auto links = read_topology_csv(cfg.topology_path);
  Topology topo = make_topology(std::move(nodes), links);

  std::vector<CountrySeries> series;
  if (has_series) {
    series = read_series_csv(topo, cfg.series_path);
  } else {
    SynthConfig sc;
    if (!cfg.synth_config_path.empty())
      sc = read_synth_config(cfg.synth_config_path);
    sc.seed = static_cast<std::uint64_t>(cfg.synth_seed);
    series = synth_generate(sc, topo.nodes(), cfg.synth_hours);
  }

  std::vector<double> alphas(series.size());
  if (cfg.alpha == "optimal") {
    for (size_t n = 0; n < series.size(); ++n)
      alphas[n] = optimal_mix(series[n], cfg.gamma).alpha_star;
  } else {
    const double a = parse_alpha_value(cfg.alpha);
    std::fill(alphas.begin(), alphas.end(), a);
  }

  std::vector<MismatchSeries> ms;
  ms.reserve(series.size());
  for (size_t n = 0; n < series.size(); ++n)
    ms.push_back(mismatch(series[n], cfg.gamma, alphas[n]));

  return {std::move(topo), std::move(series), std::move(ms),
          std::move(alphas)};
}

void cmd_mix(const RunConfig& cfg) {
  Stopwatch sw;
  LoadedInputs in = load_inputs(cfg);

  std::string csv = "iso,alpha_star,residual_mean_norm,band_low,band_high\n";
  json rows = json::array();
  auto add_row = [&](const std::string& iso, const MixResult& r,
                     double load_mean) {
    const double norm = r.residual_mean / load_mean;
    csv += iso + "," + fmt6(r.alpha_star) + "," + fmt6(norm) + "," +
           fmt6(r.band_low) + "," + fmt6(r.band_high) + "\n";
    rows.push_back({{"iso", iso},
                    {"alpha_star", r.alpha_star},
                    {"residual_mean_norm", norm},
                    {"band_low", r.band_low},
                    {"band_high", r.band_high}});
  };

  for (const auto& cs : in.series)
    add_row(cs.id, optimal_mix(cs, cfg.gamma), mean(cs.load));
  CountrySeries eu = aggregate_series(in.series);
  add_row(eu.id, optimal_mix(eu, cfg.gamma), mean(eu.load));

  const std::string csv_path = out_path(cfg, "mix.csv");
  write_file(csv_path, csv);
  const std::string json_path = out_path(cfg, "mix.json");
  write_file(json_path, json{{"rows", rows}}.dump(2) + "\n");
  write_manifest(cfg, "mix", {csv_path, json_path}, sw,
                 json{{"countries", in.series.size()}});
}

void cmd_dispatch(const RunConfig& cfg) {
  Stopwatch sw;
  LoadedInputs in = load_inputs(cfg);
  if (cfg.layout_path.empty())
    throw InvalidInput("dispatch needs --layout");
  CapacityLayout layout = read_layout_csv(in.topo, cfg.layout_path);

  DispatchResult run =
      dispatch_series(in.mismatches, in.topo, layout, cfg.eps, cfg.threads);

  const size_t T = run.hours.size();
  std::vector<std::vector<double>> flows(T);
  std::string bal = "hour", cur = "hour";
  for (const auto& node : in.topo.nodes()) {
    bal += ",B_" + node.id;
    cur += ",C_" + node.id;
  }
  bal += "\n";
  cur += "\n";
  for (size_t t = 0; t < T; ++t) {
    const auto& h = run.hours[t];
    flows[t].assign(h.flows.data(), h.flows.data() + h.flows.size());
    bal += std::to_string(t);
    cur += std::to_string(t);
    for (int n = 0; n < in.topo.node_count(); ++n) {
      bal += "," + fmt6(h.balancing[n]);
      cur += "," + fmt6(h.curtailment[n]);
    }
    bal += "\n";
    cur += "\n";
  }

  const std::string flows_path = out_path(cfg, "flows.csv");
  write_flows_csv(in.topo, flows, flows_path);
  const std::string bal_path = out_path(cfg, "balancing.csv");
  write_file(bal_path, bal);
  const std::string cur_path = out_path(cfg, "curtailment.csv");
  write_file(cur_path, cur);

  BenefitReport rep;
  rep.layout_name = cfg.layout_name;
  rep.e_b_zero = zero_balancing(in.mismatches);
  rep.e_b_unconstrained = unconstrained_balancing(in.mismatches);
  rep.e_b_layout = balancing_energy(run);
  rep.beta = benefit(rep.e_b_zero, rep.e_b_layout, rep.e_b_unconstrained);
  bool has_inf = false;
  for (int l = 0; l < layout.link_count(); ++l) {
    if (!is_finite(layout.forward[l]) && !is_finite(layout.backward[l]))
      has_inf = true;
  }
  rep.total_capacity = has_inf ? kInf : total_capacity(layout);

  double consumption_gw = 0;
  for (const auto& cs : in.series) consumption_gw += mean(cs.load);
  const json benefit = benefit_json(rep, gw_to_twh_per_year(consumption_gw));

  const std::string benefit_path = out_path(cfg, "benefit.json");
  write_file(benefit_path, benefit.dump(2) + "\n");

  write_manifest(cfg, "dispatch",
                 {flows_path, bal_path, cur_path, benefit_path}, sw, benefit);
}

void cmd_sweep(const RunConfig& cfg, char family,
               std::span<const double> params) {
  Stopwatch sw;
  if (family != 'A' && family != 'B' && family != 'C')
    throw InvalidInput("sweep family must be A, B or C");
  LoadedInputs in = load_inputs(cfg);

  CapacityLayout present, q99;
  FlowQuantileTable flows(std::vector<std::vector<double>>{{0.0}});
  SweepInputs si;
  si.topo = &in.topo;
  si.mismatches = &in.mismatches;
  si.eps = cfg.eps;
  si.threads = cfg.threads;
  bool auto_ran = false;
  if (family == 'A') {
    if (cfg.present_layout_path.empty() || cfg.q99_layout_path.empty())
      throw InvalidInput("family A needs --present-layout and --q99-layout");
    present = read_layout_csv(in.topo, cfg.present_layout_path);
    q99 = read_layout_csv(in.topo, cfg.q99_layout_path);
    si.present = &present;
    si.q99 = &q99;
  } else if (family == 'B') {
    if (cfg.q99_layout_path.empty())
      throw InvalidInput("family B needs --q99-layout");
    q99 = read_layout_csv(in.topo, cfg.q99_layout_path);
    si.q99 = &q99;
  } else {
    flows = load_or_compute_flows(in, cfg, &auto_ran);
    si.flows = &flows;
  }

  std::vector<SweepPoint> curve = sweep(family, params, si);

  double consumption_twh = 0;
  for (const auto& cs : in.series) consumption_twh += mean(cs.load);
  consumption_twh = gw_to_twh_per_year(consumption_twh);

  std::string csv = "param,total_capacity_gw,e_b_twh,e_b_pct,beta\n";
  json rows = json::array();
  for (const auto& pt : curve) {
    const double pct = 100.0 * pt.e_b / consumption_twh;
    csv += fmt6(pt.param) + "," + fmt6(pt.total_capacity) + "," +
           fmt6(pt.e_b) + "," + fmt6(pct) + "," + fmt6(pt.beta) + "\n";
    rows.push_back({{"param", pt.param},
                    {"total_capacity_gw", pt.total_capacity},
                    {"e_b_twh", pt.e_b},
                    {"e_b_pct", pct},
                    {"beta", pt.beta}});
  }
  const std::string name = std::string("sweep_") + family;
  const std::string csv_path = out_path(cfg, name + ".csv");
  write_file(csv_path, csv);
  const std::string json_path = out_path(cfg, name + ".json");
  write_file(json_path, json{{"family", std::string(1, family)},
                             {"rows", rows}}
                            .dump(2) +
                            "\n");
  write_manifest(cfg, "sweep", {csv_path, json_path}, sw,
                 json{{"family", std::string(1, family)},
                      {"points", curve.size()},
                      {"auto_unconstrained_run", auto_ran}});
}

void cmd_quantile_layout(const RunConfig& cfg, double c) {
  Stopwatch sw;
  if (c < 50.0 || c > 100.0)
    throw InvalidInput("quantile percentage outside [50,100]");
  LoadedInputs in = load_inputs(cfg);
  bool auto_ran = false;
  FlowQuantileTable flows = load_or_compute_flows(in, cfg, &auto_ran);
  CapacityLayout layout = quantile_capacity_layout(flows, c);

  const std::string path = out_path(cfg, "layout_q" + fmt6(c) + ".csv");
  write_layout_csv(in.topo, layout, path);
  write_manifest(cfg, "quantile-layout", {path}, sw,
                 json{{"c", c},
                      {"total_capacity_gw", total_capacity(layout)},
                      {"auto_unconstrained_run", auto_ran}});
}

void cmd_report(const RunConfig& cfg,
                const std::vector<std::string>& result_dirs) {
  Stopwatch sw;
  if (result_dirs.empty())
    throw InvalidInput("report needs at least one dispatch result directory");
  LoadedInputs in = load_inputs(cfg);
  const Eigen::MatrixXd& K = in.topo.incidence();
  const size_t T = in.mismatches.front().delta.size();

  constexpr double kBinWidth = 0.05;  // in units of mean load
  std::vector<std::string> outputs;
  json summary = json::array();

  for (const auto& dir : result_dirs) {
    const std::string name = fs::path(dir).filename().string();
    auto flows = read_flows_csv(in.topo, (fs::path(dir) / "flows.csv").string());
    if (flows.size() != T)
      throw InvalidInput(dir + ": run length does not match the series");

    // Reconstruct the run from the stored flows; balancing and curtailment
    // follow pointwise from the post-transmission mismatch.
    DispatchResult run;
    run.layout = CapacityLayout::zero(in.topo.link_count());
    run.hours.resize(T);
    const int N = in.topo.node_count();
    for (size_t t = 0; t < T; ++t) {
      HourlyDispatch& h = run.hours[t];
      h.flows = Eigen::Map<const Eigen::VectorXd>(flows[t].data(),
                                                  in.topo.link_count());
      Eigen::VectorXd net = K * h.flows;
      h.balancing.resize(N);
      h.curtailment.resize(N);
      for (int n = 0; n < N; ++n) {
        const double post = in.mismatches[n].delta[t] - net[n];
        h.balancing[n] = std::max(-post, 0.0);
        h.curtailment[n] = std::max(post, 0.0);
      }
    }

    auto rows = country_report(run, in.mismatches, in.topo.nodes());

    std::string csv =
        "iso,residual_norm,excess_norm,q01,q10,q90,q99,import_share\n";
    double wsum = 0, racc = 0, eacc = 0, q01acc = 0, q10acc = 0, q90acc = 0,
           q99acc = 0, iacc = 0;
    for (size_t n = 0; n < rows.size(); ++n) {
      const auto& r = rows[n];
      const double lmean = in.topo.nodes()[n].mean_load;
      const double q01 = r.q01 / lmean, q10 = r.q10 / lmean,
                   q90 = r.q90 / lmean, q99 = r.q99 / lmean;
      csv += r.id + "," + fmt6(r.residual_norm) + "," + fmt6(r.excess_norm) +
             "," + fmt6(q01) + "," + fmt6(q10) + "," + fmt6(q90) + "," +
             fmt6(q99) + "," + fmt6(r.import_share) + "\n";
      wsum += lmean;
      racc += lmean * r.residual_norm;
      eacc += lmean * r.excess_norm;
      q01acc += lmean * q01;
      q10acc += lmean * q10;
      q90acc += lmean * q90;
      q99acc += lmean * q99;
      iacc += lmean * r.import_share;
    }
    // EU row: load-weighted average of the country rows.
    csv += "EU," + fmt6(racc / wsum) + "," + fmt6(eacc / wsum) + "," +
           fmt6(q01acc / wsum) + "," + fmt6(q10acc / wsum) + "," +
           fmt6(q90acc / wsum) + "," + fmt6(q99acc / wsum) + "," +
           fmt6(iacc / wsum) + "\n";

    const std::string report_path =
        out_path(cfg, "country_report_" + name + ".csv");
    write_file(report_path, csv);
    outputs.push_back(report_path);

    // Post-transmission mismatch histograms, normalized by mean load.
    std::string hist = "iso,bin_center,count\n";
    std::vector<double> post(T);
    for (int n = 0; n < N; ++n) {
      for (size_t t = 0; t < T; ++t) {
        post[t] = run.hours[t].curtailment[n] - run.hours[t].balancing[n];
      }
      Histogram h = mismatch_histogram(post, kBinWidth,
                                       in.topo.nodes()[n].mean_load);
      for (size_t b = 0; b < h.counts.size(); ++b) {
        hist += in.topo.nodes()[n].id + "," + fmt6(h.centers[b]) + "," +
                std::to_string(h.counts[b]) + "\n";
      }
    }
    const std::string hist_path = out_path(cfg, "histograms_" + name + ".csv");
    write_file(hist_path, hist);
    outputs.push_back(hist_path);
    summary.push_back({{"result", name}, {"countries", rows.size()}});
  }

  write_manifest(cfg, "report", outputs, sw, summary);
}

void cmd_synth(const RunConfig& cfg) {
  Stopwatch sw;
  if (cfg.synth_seed < 0) throw InvalidInput("synth needs --synth-seed");
  LoadedInputs in = load_inputs(cfg);
  const std::string path = out_path(cfg, "series.csv");
  write_series_csv(in.series, path);
  write_manifest(cfg, "synth", {path}, sw,
                 json{{"hours", cfg.synth_hours},
                      {"countries", in.series.size()}});
}

}  // namespace gridflow
