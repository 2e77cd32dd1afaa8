// Copyright (c) 2026 The gridflow Authors.
// Licensed under the Apache License, Version 2.0.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "series.hpp"

using namespace gridflow;

namespace {

CountrySeries tiny() {
  CountrySeries cs;
  cs.id = "XX";
  cs.load = {2.0, 4.0};
  cs.wind_raw = {1.0, 3.0};   // mean 2
  cs.solar_raw = {4.0, 0.0};  // mean 2
  return cs;
}

}  // namespace

TEST_CASE("mismatch formula by hand") {
  CountrySeries cs = tiny();
  // <L> = 3; gen(t) = a W/<W> + (1-a) S/<S>.
  MismatchSeries ms = mismatch(cs, 1.0, 0.5);
  // t=0: gen = 0.5*(1/2) + 0.5*(4/2) = 1.25 -> 3*1.25 - 2 = 1.75
  // t=1: gen = 0.5*(3/2) + 0.5*0 = 0.75 -> 3*0.75 - 4 = -1.75
  CHECK(ms.delta[0] == doctest::Approx(1.75));
  CHECK(ms.delta[1] == doctest::Approx(-1.75));

  MismatchSeries g0 = mismatch(cs, 0.0, 0.5);
  CHECK(g0.delta[0] == doctest::Approx(-2.0));
  CHECK(g0.delta[1] == doctest::Approx(-4.0));
}

TEST_CASE("generation shapes are scale free") {
  CountrySeries cs = tiny();
  CountrySeries scaled = cs;
  for (auto& v : scaled.wind_raw) v *= 37.5;
  for (auto& v : scaled.solar_raw) v *= 0.004;
  MismatchSeries a = mismatch(cs, 1.2, 0.7);
  MismatchSeries b = mismatch(scaled, 1.2, 0.7);
  for (size_t t = 0; t < a.delta.size(); ++t)
    CHECK(a.delta[t] == doctest::Approx(b.delta[t]));
}

TEST_CASE("mismatch argument validation") {
  CountrySeries cs = tiny();
  CHECK_THROWS_AS(mismatch(cs, 1.0, -0.1), InvalidInput);
  CHECK_THROWS_AS(mismatch(cs, 1.0, 1.1), InvalidInput);
  CHECK_THROWS_AS(mismatch(cs, -1.0, 0.5), InvalidInput);
  cs.load[1] = 0.0;
  CHECK_THROWS_AS(mismatch(cs, 1.0, 0.5), InvalidInput);
}

TEST_CASE("series validation") {
  CountrySeries cs = tiny();
  validate(cs);
  CountrySeries bad = cs;
  bad.wind_raw.pop_back();
  CHECK_THROWS_AS(validate(bad), InvalidInput);
  bad = cs;
  bad.solar_raw = {0.0, 0.0};
  CHECK_THROWS_AS(validate(bad), InvalidInput);
  bad = cs;
  bad.wind_raw[0] = -0.5;
  CHECK_THROWS_AS(validate(bad), InvalidInput);
}

TEST_CASE("residual and excess split the mismatch") {
  MismatchSeries ms{"XX", {1.5, -2.0, 0.0}};
  ResidualExcess re = residual_excess(ms);
  CHECK(re.residual[0] == 0.0);
  CHECK(re.residual[1] == 2.0);
  CHECK(re.residual[2] == 0.0);
  CHECK(re.excess[0] == 1.5);
  CHECK(re.excess[1] == 0.0);
}

TEST_CASE("optimal mix finds a perfect wind match") {
  // Wind shape proportional to load: alpha = 1 with gamma = 1 yields zero
  // residual; solar is flat and cannot track the load.
  CountrySeries cs;
  cs.id = "XX";
  cs.load = {1.0, 2.0, 3.0, 2.0};
  cs.wind_raw = {0.5, 1.0, 1.5, 1.0};
  cs.solar_raw = {1.0, 1.0, 1.0, 1.0};
  MixResult r = optimal_mix(cs, 1.0);
  CHECK(r.alpha_star == doctest::Approx(1.0));
  CHECK(r.residual_mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.band_high == doctest::Approx(1.0));
}

TEST_CASE("optimal mix against a brute-force scan") {
  // Independent oracle: evaluate the mean residual on a fine alpha grid
  // directly from the definition and compare the argmin.
  CountrySeries cs;
  cs.id = "XX";
  cs.load.resize(48);
  cs.wind_raw.resize(48);
  cs.solar_raw.resize(48);
  for (int t = 0; t < 48; ++t) {
    cs.load[t] = 3.0 + std::cos(0.3 * t);
    cs.wind_raw[t] = 1.0 + 0.8 * std::sin(0.7 * t + 1.0);
    cs.solar_raw[t] = (t % 24 >= 7 && t % 24 < 17) ? 1.0 + 0.1 * (t % 5) : 0.0;
  }
  const double gamma = 0.9;
  double best_a = 0, best_v = 1e300;
  const double wm = mean(cs.wind_raw), sm = mean(cs.solar_raw),
               lm = mean(cs.load);
  for (int k = 0; k <= 100; ++k) {
    const double a = k / 100.0;
    double sum = 0;
    for (int t = 0; t < 48; ++t) {
      const double gen =
          a * cs.wind_raw[t] / wm + (1.0 - a) * cs.solar_raw[t] / sm;
      sum += std::max(cs.load[t] - gamma * gen * lm, 0.0);
    }
    if (sum / 48.0 < best_v) {
      best_v = sum / 48.0;
      best_a = a;
    }
  }
  MixResult r = optimal_mix(cs, gamma);
  CHECK(r.alpha_star == doctest::Approx(best_a));
  CHECK(r.residual_mean == doctest::Approx(best_v));
  CHECK(r.band_low <= r.alpha_star);
  CHECK(r.band_high >= r.alpha_star);
}

TEST_CASE("detrend rescales every year to the final year's mean") {
  std::vector<double> load = {1.0, 3.0, 4.0, 4.0};  // year means 2 and 4
  auto out = detrend(load, {{0, 2}, {2, 4}});
  CHECK(out[0] == doctest::Approx(2.0));
  CHECK(out[1] == doctest::Approx(6.0));
  CHECK(out[2] == doctest::Approx(4.0));
  CHECK(out[3] == doctest::Approx(4.0));
  CHECK_THROWS_AS(detrend(load, {{0, 2}}), InvalidInput);  // gap
  CHECK_THROWS_AS(detrend(load, {{0, 2}, {2, 5}}), InvalidInput);
}

TEST_CASE("synthetic series are deterministic in the seed") {
  std::vector<Node> nodes{{"AA", 10.0}, {"BB", 5.0}};
  SynthConfig cfg;
  cfg.seed = 42;
  auto a = synth_generate(cfg, nodes, 72);
  auto b = synth_generate(cfg, nodes, 72);
  REQUIRE(a.size() == 2);
  for (size_t n = 0; n < 2; ++n) {
    CHECK(a[n].id == nodes[n].id);
    for (int t = 0; t < 72; ++t) {
      CHECK(a[n].load[t] == b[n].load[t]);
      CHECK(a[n].wind_raw[t] == b[n].wind_raw[t]);
      CHECK(a[n].solar_raw[t] == b[n].solar_raw[t]);
    }
  }
  cfg.seed = 43;
  auto c = synth_generate(cfg, nodes, 72);
  bool any_diff = false;
  for (int t = 0; t < 72; ++t)
    if (c[0].load[t] != a[0].load[t]) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("synthetic series respect physical constraints") {
  std::vector<Node> nodes{{"AA", 10.0}};
  SynthConfig cfg;
  cfg.seed = 7;
  auto s = synth_generate(cfg, nodes, 24 * 14);
  for (int t = 0; t < 24 * 14; ++t) {
    CHECK(s[0].load[t] > 0.0);
    CHECK(s[0].wind_raw[t] >= 0.0);
    CHECK(s[0].solar_raw[t] >= 0.0);
    const int hod = t % 24;
    if (hod < cfg.sunrise_hour || hod >= cfg.sunset_hour)
      CHECK(s[0].solar_raw[t] == 0.0);
  }
  // Mean load tracks the configured level.
  CHECK(mean(s[0].load) == doctest::Approx(10.0).epsilon(0.15));
  CHECK_THROWS_AS(synth_generate(cfg, nodes, 10), InvalidInput);
}

TEST_CASE("quantiles interpolate linearly") {
  std::vector<double> v = {4.0, 1.0, 3.0, 2.0};
  CHECK(quantile(v, 0.0) == doctest::Approx(1.0));
  CHECK(quantile(v, 1.0) == doctest::Approx(4.0));
  CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
  auto qs = quantiles(v, std::vector<double>{0.0, 1.0});
  CHECK(qs[0] == doctest::Approx(1.0));
  CHECK(qs[1] == doctest::Approx(4.0));
}

TEST_CASE("aggregate weights shapes by mean load") {
  CountrySeries a;
  a.id = "AA";
  a.load = {1.0, 3.0};       // mean 2
  a.wind_raw = {2.0, 0.0};   // mean 1
  a.solar_raw = {1.0, 1.0};  // mean 1
  CountrySeries b;
  b.id = "BB";
  b.load = {4.0, 4.0};       // mean 4
  b.wind_raw = {1.0, 3.0};   // mean 2
  b.solar_raw = {3.0, 1.0};  // mean 2
  CountrySeries agg = aggregate_series({a, b}, "EU");
  CHECK(agg.load[0] == doctest::Approx(5.0));
  CHECK(agg.load[1] == doctest::Approx(7.0));
  // wind: 2*(2/1) + 4*(1/2) = 6 at t=0; 2*0 + 4*(3/2) = 6 at t=1.
  CHECK(agg.wind_raw[0] == doctest::Approx(6.0));
  CHECK(agg.wind_raw[1] == doctest::Approx(6.0));
  // solar: 2*1 + 4*(3/2) = 8; 2*1 + 4*(1/2) = 4.
  CHECK(agg.solar_raw[0] == doctest::Approx(8.0));
  CHECK(agg.solar_raw[1] == doctest::Approx(4.0));
}
