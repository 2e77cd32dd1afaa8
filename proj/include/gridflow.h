/*
 * Copyright (c) 2026 The gridflow Authors.
 * Licensed under the Apache License, Version 2.0.
 *
 * C interface of the gridflow shared library: renewable dispatch simulation
 * with constrained DC power flow. All functions return GF_OK on success;
 * on failure gf_last_error() carries a thread-local message.
 */

#ifndef GRIDFLOW_H
#define GRIDFLOW_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define GF_API __declspec(dllexport)
#else
#define GF_API __attribute__((visibility("default")))
#endif

typedef enum gf_status {
  GF_OK = 0,
  GF_ERR_INPUT = 2,  /* bad arguments, bad files, broken invariants */
  GF_ERR_SOLVER = 3, /* an optimization subproblem failed */
  GF_ERR_INTERNAL = 4
} gf_status;

/* Opaque handles. Every *_new / *_load function hands ownership to the
 * caller; release with the matching *_free. NULL is safe to free. */
typedef struct gf_topology gf_topology;
typedef struct gf_layout gf_layout;
typedef struct gf_series gf_series;
typedef struct gf_dispatch gf_dispatch;

GF_API const char *gf_version(void);
GF_API const char *gf_last_error(void);

/* ---- topology ---------------------------------------------------------- */

/* nodes_csv: `iso,mean_load_gw`; topology_csv: `link_id,from_iso,to_iso`. */
GF_API gf_status gf_topology_load(const char *topology_csv,
                                  const char *nodes_csv, gf_topology **out);
GF_API void gf_topology_free(gf_topology *t);
GF_API int gf_topology_node_count(const gf_topology *t);
GF_API int gf_topology_link_count(const gf_topology *t);

/* ---- capacity layouts -------------------------------------------------- */

GF_API gf_status gf_layout_load(const gf_topology *t, const char *layout_csv,
                                gf_layout **out);
GF_API gf_status gf_layout_zero(const gf_topology *t, gf_layout **out);
GF_API gf_status gf_layout_unbounded(const gf_topology *t, gf_layout **out);
/* Interpolation A: per direction min(a * present, q99). */
GF_API gf_status gf_layout_upscale(const gf_layout *present,
                                   const gf_layout *q99, double a,
                                   gf_layout **out);
/* Interpolation B: per direction b * q99, b in [0,1]. */
GF_API gf_status gf_layout_scale(const gf_layout *q99, double b,
                                 gf_layout **out);
GF_API gf_status gf_layout_total_capacity(const gf_layout *l, double *gw);
GF_API gf_status gf_layout_save(const gf_topology *t, const gf_layout *l,
                                const char *path);
GF_API void gf_layout_free(gf_layout *l);

/* ---- series ------------------------------------------------------------ */

GF_API gf_status gf_series_load(const gf_topology *t, const char *series_csv,
                                gf_series **out);
/* config_json may be NULL for defaults; the seed overrides the file. */
GF_API gf_status gf_series_synth(const gf_topology *t, const char *config_json,
                                 uint64_t seed, int hours, gf_series **out);
GF_API void gf_series_free(gf_series *s);

/* ---- dispatch ---------------------------------------------------------- */

/* alpha: "optimal" for per-country optimal mixes or a fixed value in [0,1].
 * eps < 0 selects the default step-2 relaxation; threads <= 0 selects
 * hardware parallelism. */
GF_API gf_status gf_dispatch_run(const gf_topology *t, const gf_layout *l,
                                 const gf_series *s, double gamma,
                                 const char *alpha, double eps, int threads,
                                 gf_dispatch **out);
GF_API gf_status gf_dispatch_balancing_energy(const gf_dispatch *d,
                                              double *twh_per_year);
/* beta relative to the zero and unconstrained extremes of the same series. */
GF_API gf_status gf_dispatch_benefit(const gf_dispatch *d, double *beta);
/* Quantile layout (interpolation C) from an unconstrained run; c in [50,100]. */
GF_API gf_status gf_quantile_layout(const gf_dispatch *unconstrained, double c,
                                    gf_layout **out);
GF_API void gf_dispatch_free(gf_dispatch *d);

/* ---- command-level entry points (the CLI is a thin wrapper over these) -- */

typedef struct gf_run_options {
  const char *topology;       /* required */
  const char *nodes;          /* required */
  const char *layout;         /* dispatch */
  const char *series;         /* xor synth_seed >= 0 */
  const char *synth_config;   /* optional JSON */
  int64_t synth_seed;         /* -1 when unused */
  int synth_hours;
  double gamma;
  const char *alpha;          /* "optimal" or fixed value */
  double eps;                 /* < 0: default */
  int threads;                /* <= 0: hardware parallelism */
  const char *out_dir;
  const char *present_layout; /* family-A sweeps */
  const char *q99_layout;     /* family-A/B sweeps */
  const char *flows;          /* stored unconstrained flows.csv */
  const char *layout_name;
} gf_run_options;

/* Fills *opt with defaults (NULL paths, synth_seed -1, gamma 1, ...). */
GF_API void gf_run_options_init(gf_run_options *opt);

GF_API gf_status gf_cmd_mix(const gf_run_options *opt);
GF_API gf_status gf_cmd_dispatch(const gf_run_options *opt);
GF_API gf_status gf_cmd_sweep(const gf_run_options *opt, char family,
                              const double *params, int n_params);
GF_API gf_status gf_cmd_quantile_layout(const gf_run_options *opt, double c);
GF_API gf_status gf_cmd_report(const gf_run_options *opt,
                               const char *const *result_dirs, int n_dirs);
GF_API gf_status gf_cmd_synth(const gf_run_options *opt);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* GRIDFLOW_H */
