// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.
//
// extern-C shell around the core library. Exceptions stop here and turn
// into status codes plus a thread-local message.

#include "gridflow.h"

#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "common.hpp"
#include "dispatch.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "run.hpp"
#include "series.hpp"

namespace {

thread_local std::string g_last_error;

gf_status fail(gf_status code, const char* what) {
  g_last_error = what ? what : "unknown error";
  return code;
}

template <typename Fn>
gf_status guarded(Fn&& fn) {
  try {
    fn();
    return GF_OK;
  } catch (const gridflow::InvalidInput& e) {
    return fail(GF_ERR_INPUT, e.what());
  } catch (const gridflow::SolverError& e) {
    return fail(GF_ERR_SOLVER, e.what());
  } catch (const std::exception& e) {
    return fail(GF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(GF_ERR_INTERNAL, "unknown error");
  }
}

gridflow::RunConfig to_config(const gf_run_options& o) {
  gridflow::RunConfig cfg;
  auto str = [](const char* s) { return s ? std::string(s) : std::string(); };
  cfg.topology_path = str(o.topology);
  cfg.nodes_path = str(o.nodes);
  cfg.layout_path = str(o.layout);
  cfg.series_path = str(o.series);
  cfg.synth_config_path = str(o.synth_config);
  cfg.synth_seed = o.synth_seed;
  cfg.synth_hours = o.synth_hours;
  cfg.gamma = o.gamma;
  if (o.alpha) cfg.alpha = o.alpha;
  cfg.eps = o.eps;
  cfg.threads = o.threads;
  if (o.out_dir) cfg.out_dir = o.out_dir;
  cfg.present_layout_path = str(o.present_layout);
  cfg.q99_layout_path = str(o.q99_layout);
  cfg.flows_path = str(o.flows);
  if (o.layout_name) cfg.layout_name = o.layout_name;
  return cfg;
}

}  // namespace

struct gf_topology {
  gridflow::Topology topo;
};

struct gf_layout {
  gridflow::CapacityLayout layout;
};

struct gf_series {
  std::vector<gridflow::CountrySeries> series;
};

struct gf_dispatch {
  gridflow::DispatchResult result;
  std::vector<gridflow::MismatchSeries> mismatches;
};

extern "C" {

const char* gf_version(void) { return gridflow::kVersion; }

const char* gf_last_error(void) { return g_last_error.c_str(); }

gf_status gf_topology_load(const char* topology_csv, const char* nodes_csv,
                           gf_topology** out) {
  if (!topology_csv || !nodes_csv || !out)
    return fail(GF_ERR_INPUT, "null argument");
  return guarded([&] {
    auto nodes = gridflow::read_mean_loads_csv(nodes_csv);
    auto links = gridflow::read_topology_csv(topology_csv);
    *out = new gf_topology{
        gridflow::make_topology(std::move(nodes), links)};
  });
}

void gf_topology_free(gf_topology* t) { delete t; }

int gf_topology_node_count(const gf_topology* t) {
  return t ? t->topo.node_count() : 0;
}

int gf_topology_link_count(const gf_topology* t) {
  return t ? t->topo.link_count() : 0;
}

gf_status gf_layout_load(const gf_topology* t, const char* layout_csv,
                         gf_layout** out) {
  if (!t || !layout_csv || !out) return fail(GF_ERR_INPUT, "null argument");
  return guarded([&] {
    *out = new gf_layout{gridflow::read_layout_csv(t->topo, layout_csv)};
  });
}

gf_status gf_layout_zero(const gf_topology* t, gf_layout** out) {
  if (!t || !out) return fail(GF_ERR_INPUT, "null argument");
  return guarded([&] {
    *out = new gf_layout{gridflow::CapacityLayout::zero(t->topo.link_count())};
  });
}

gf_status gf_layout_unbounded(const gf_topology* t, gf_layout** out) {
  if (!t || !out) return fail(GF_ERR_INPUT, "null argument");
  return guarded([&] {
    *out = new gf_layout{
        gridflow::CapacityLayout::unbounded(t->topo.link_count())};
  });
}

gf_status gf_layout_upscale(const gf_layout* present, const gf_layout* q99,
                            double a, gf_layout** out) {
  if (!present || !q99 || !out) return fail(GF_ERR_INPUT, "null argument");
  return guarded([&] {
    *out = new gf_layout{
        gridflow::upscale_present(present->layout, q99->layout, a)};
  });
}

gf_status gf_layout_scale(const gf_layout* q99, double b, gf_layout** out) {
  if (!q99 || !out) return fail(GF_ERR_INPUT, "null argument");
  return guarded(
      [&] { *out = new gf_layout{gridflow::scale_layout(q99->layout, b)}; });
}

gf_status gf_layout_total_capacity(const gf_layout* l, double* gw) {
  if (!l || !gw) return fail(GF_ERR_INPUT, "null argument");
  return guarded([&] { *gw = gridflow::total_capacity(l->layout); });
}

gf_status gf_layout_save(const gf_topology* t, const gf_layout* l,
                         const char* path) {
  if (!t || !l || !path) return fail(GF_ERR_INPUT, "null argument");
  return guarded(
      [&] { gridflow::write_layout_csv(t->topo, l->layout, path); });
}

void gf_layout_free(gf_layout* l) { delete l; }

gf_status gf_series_load(const gf_topology* t, const char* series_csv,
                         gf_series** out) {
  if (!t || !series_csv || !out) return fail(GF_ERR_INPUT, "null argument");
  return guarded([&] {
    *out = new gf_series{gridflow::read_series_csv(t->topo, series_csv)};
  });
}

gf_status gf_series_synth(const gf_topology* t, const char* config_json,
                          uint64_t seed, int hours, gf_series** out) {
  if (!t || !out) return fail(GF_ERR_INPUT, "null argument");
  return guarded([&] {
    gridflow::SynthConfig cfg;
    if (config_json) cfg = gridflow::read_synth_config(config_json);
    cfg.seed = seed;
    *out = new gf_series{
        gridflow::synth_generate(cfg, t->topo.nodes(), hours)};
  });
}

void gf_series_free(gf_series* s) { delete s; }

gf_status gf_dispatch_run(const gf_topology* t, const gf_layout* l,
                          const gf_series* s, double gamma, const char* alpha,
                          double eps, int threads, gf_dispatch** out) {
  if (!t || !l || !s || !out) return fail(GF_ERR_INPUT, "null argument");
  return guarded([&] {
    std::vector<gridflow::MismatchSeries> ms;
    ms.reserve(s->series.size());
    const std::string mode = alpha ? alpha : "optimal";
    for (const auto& cs : s->series) {
      double a;
      if (mode == "optimal") {
        a = gridflow::optimal_mix(cs, gamma).alpha_star;
      } else {
        try {
          a = std::stod(mode);
        } catch (const std::exception&) {
          throw gridflow::InvalidInput("alpha must be 'optimal' or a number");
        }
        if (a < 0 || a > 1)
          throw gridflow::InvalidInput("alpha must lie in [0,1]");
      }
      ms.push_back(gridflow::mismatch(cs, gamma, a));
    }
    auto result =
        gridflow::dispatch_series(ms, t->topo, l->layout, eps, threads);
    *out = new gf_dispatch{std::move(result), std::move(ms)};
  });
}

gf_status gf_dispatch_balancing_energy(const gf_dispatch* d,
                                       double* twh_per_year) {
  if (!d || !twh_per_year) return fail(GF_ERR_INPUT, "null argument");
  return guarded(
      [&] { *twh_per_year = gridflow::balancing_energy(d->result); });
}

gf_status gf_dispatch_benefit(const gf_dispatch* d, double* beta) {
  if (!d || !beta) return fail(GF_ERR_INPUT, "null argument");
  return guarded([&] {
    const double e0 = gridflow::zero_balancing(d->mismatches);
    const double eu = gridflow::unconstrained_balancing(d->mismatches);
    *beta = gridflow::benefit(e0, gridflow::balancing_energy(d->result), eu);
  });
}

gf_status gf_quantile_layout(const gf_dispatch* unconstrained, double c,
                             gf_layout** out) {
  if (!unconstrained || !out) return fail(GF_ERR_INPUT, "null argument");
  return guarded([&] {
    *out = new gf_layout{
        gridflow::flow_quantile_layout(unconstrained->result, c)};
  });
}

void gf_dispatch_free(gf_dispatch* d) { delete d; }

void gf_run_options_init(gf_run_options* opt) {
  if (!opt) return;
  std::memset(opt, 0, sizeof(*opt));
  opt->synth_seed = -1;
  opt->synth_hours = 8760;
  opt->gamma = 1.0;
  opt->alpha = "optimal";
  opt->eps = -1;
  opt->threads = 0;
  opt->out_dir = ".";
  opt->layout_name = "layout";
}

gf_status gf_cmd_mix(const gf_run_options* opt) {
  if (!opt) return fail(GF_ERR_INPUT, "null options");
  return guarded([&] { gridflow::cmd_mix(to_config(*opt)); });
}

gf_status gf_cmd_dispatch(const gf_run_options* opt) {
  if (!opt) return fail(GF_ERR_INPUT, "null options");
  return guarded([&] { gridflow::cmd_dispatch(to_config(*opt)); });
}

gf_status gf_cmd_sweep(const gf_run_options* opt, char family,
                       const double* params, int n_params) {
  if (!opt || (!params && n_params > 0))
    return fail(GF_ERR_INPUT, "null options");
  return guarded([&] {
    gridflow::cmd_sweep(to_config(*opt), family,
                        std::span<const double>(params, params + n_params));
  });
}

gf_status gf_cmd_quantile_layout(const gf_run_options* opt, double c) {
  if (!opt) return fail(GF_ERR_INPUT, "null options");
  return guarded([&] { gridflow::cmd_quantile_layout(to_config(*opt), c); });
}

gf_status gf_cmd_report(const gf_run_options* opt,
                        const char* const* result_dirs, int n_dirs) {
  if (!opt || (!result_dirs && n_dirs > 0))
    return fail(GF_ERR_INPUT, "null options");
  return guarded([&] {
    std::vector<std::string> dirs;
    for (int i = 0; i < n_dirs; ++i) {
      if (!result_dirs[i])
        throw gridflow::InvalidInput("null result directory");
      dirs.emplace_back(result_dirs[i]);
    }
    gridflow::cmd_report(to_config(*opt), dirs);
  });
}

gf_status gf_cmd_synth(const gf_run_options* opt) {
  if (!opt) return fail(GF_ERR_INPUT, "null options");
  return guarded([&] { gridflow::cmd_synth(to_config(*opt)); });
}

}  // extern "C"
