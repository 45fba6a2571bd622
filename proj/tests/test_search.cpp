#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "kanedge/error.hpp"
#include "kanedge/search.hpp"

using namespace kanedge;

namespace {

Dataset wave_data(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Dataset d;
  d.n_features = 2;
  d.n_outputs = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double x[] = {u(rng), u(rng)};
    const double y[] = {std::sin(3.0 * x[0]) * 0.5 + 0.3 * x[1] * x[1]};
    d.add(x, y);
  }
  return d;
}

SearchConfig base_config() {
  SearchConfig c;
  c.candidates = {{2, 3, 1}};
  c.G_init = 5;
  c.E = 5;
  c.N_epochs = 4;
  c.max_G = 20;
  c.seed = 11;
  c.train.learning_rate = 0.2;
  c.train.batch_size = 16;
  c.train.loss = Loss::SquaredError;
  return c;
}

double area_mm2(const SearchConfig& c, int G) {
  return feasible(c.candidates[0], c.K, G, {}, UnitCosts::synthetic_default(), c.accelerator()).cost.area() * 1e-6;
}

}  // namespace

TEST_CASE("constraints report the first violated bound") {
  CostReport r;
  r.add("x", {2e6, 5.0, 7.0});
  Constraints c;
  CHECK(c.violation(r).empty());
  c.latency_max_ns = 6.0;
  CHECK(c.violation(r).find("latency") == 0);
  c.area_max_mm2 = 1.0;
  CHECK(c.violation(r).find("area") == 0);
  c.area_max_mm2 = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  const auto j = constraints_to_json(Constraints{3.0, std::nullopt, 1.0});
  const auto back = constraints_from_json(j);
  CHECK(back.area_max_mm2 == 3.0);
  CHECK_FALSE(back.energy_max_pj);
}

TEST_CASE("feasibility raises on a grid with no valid LD") {
  const auto c = base_config();
  CHECK_THROWS_AS(feasible(c.candidates[0], 3, 300, {}, UnitCosts::synthetic_default(), c.accelerator()),
                  InfeasibleError);
  CHECK(feasible(c.candidates[0], 3, 5, {}, UnitCosts::synthetic_default(), c.accelerator()).ok);
  CHECK(area_mm2(c, 15) > area_mm2(c, 10));
}

TEST_CASE("feasibility is monotone in every bound") {
  const auto c = base_config();
  const auto costs = UnitCosts::synthetic_default();
  const auto spec = c.accelerator();
  CHECK(feasible(c.candidates[0], 3, 5, {}, costs, spec).ok);
  Constraints eps;
  eps.area_max_mm2 = 1e-300;
  CHECK_FALSE(feasible(c.candidates[0], 3, 5, eps, costs, spec).ok);
  const auto base = feasible(c.candidates[0], 3, 10, {}, costs, spec).cost;
  const double ref[] = {base.area() * 1e-6, base.energy(), base.latency()};
  for (int which = 0; which < 3; ++which) {
    bool was_ok = true;
    for (double f = 4.0; f > 0.05; f *= 0.8) {
      Constraints k;
      const double bound = ref[which] * f;
      if (which == 0) k.area_max_mm2 = bound;
      if (which == 1) k.energy_max_pj = bound;
      if (which == 2) k.latency_max_ns = bound;
      const bool ok = feasible(c.candidates[0], 3, 10, k, costs, spec).ok;
      CHECK_FALSE((ok && !was_ok));
      CHECK(ok == (f >= 1.0));
      was_ok = ok;
    }
  }
}

TEST_CASE("mode picks the input generator width") {
  auto c = base_config();
  CHECK(c.accelerator().out_bits == 8);
  c.mode = EncoderMode::TdA;
  CHECK(c.accelerator().out_bits == 4);
}

TEST_CASE("no feasible start") {
  auto c = base_config();
  Constraints k;
  k.area_max_mm2 = area_mm2(c, 5) * 0.5;
  CHECK_THROWS_AS(optimize(wave_data(200, 1), k, c, UnitCosts::synthetic_default()), NoFeasibleStartError);
}

TEST_CASE("screening skips infeasible candidates") {
  auto c = base_config();
  Constraints k;
  k.area_max_mm2 = area_mm2(c, 5) * 1.01;
  c.candidates = {{2, 64, 64, 1}, {2, 3, 1}};
  c.max_G = 5;
  const auto o = optimize(wave_data(200, 1), k, c, UnitCosts::synthetic_default());
  CHECK(o.arch == std::vector<int>{2, 3, 1});
}

TEST_CASE("max_G equal to G_init gives one decision") {
  auto c = base_config();
  c.max_G = c.G_init;
  const auto o = optimize(wave_data(300, 2), {}, c, UnitCosts::synthetic_default());
  REQUIRE(o.trace.size() == 1);
  CHECK(o.trace[0].decision != Decision::Extend);
  CHECK(o.final_G == c.G_init);
}

TEST_CASE("area bound admitting G <= 10 stops at 5 or 10") {
  auto c = base_config();
  Constraints k;
  const double admitted = std::max(area_mm2(c, 5), area_mm2(c, 10));
  REQUIRE(area_mm2(c, 15) > admitted);
  k.area_max_mm2 = 0.5 * (admitted + area_mm2(c, 15));
  const auto o = optimize(wave_data(400, 3), k, c, UnitCosts::synthetic_default());
  CHECK((o.final_G == 5 || o.final_G == 10));
  for (const auto& s : o.trace) CHECK(s.G <= 10);
  CHECK(o.final_cost.area() * 1e-6 <= *k.area_max_mm2);
}

TEST_CASE("search is deterministic and never worse than the start") {
  const auto c = base_config();
  const auto data = wave_data(400, 4);
  const auto a = optimize(data, {}, c, UnitCosts::synthetic_default());
  const auto b = optimize(data, {}, c, UnitCosts::synthetic_default());
  CHECK(a.weights_hash == b.weights_hash);
  CHECK(trace_csv(a) == trace_csv(b));
  CHECK(outcome_to_json(a) == outcome_to_json(b));
  CHECK(a.final_val_loss <= a.initial_val_loss);
  CHECK(a.trace.size() <= static_cast<std::size_t>((c.max_G - c.G_init) / c.E + 1));
  CHECK(a.final_G <= c.max_G);
  CHECK(a.weights_hash == network_hash(a.net));
}

TEST_CASE("revert at the first boundary restores the initial weights") {
  auto c = base_config();
  c.train.learning_rate = 1e-12;
  const auto o = optimize(wave_data(200, 5), {}, c, UnitCosts::synthetic_default());
  REQUIRE(o.trace.size() == 1);
  CHECK(o.trace[0].decision == Decision::RevertStop);
  const auto init = random_network(c.candidates[0], SplineGrid(c.G_init, c.K, c.x_min, c.x_max), c.init_scale, c.seed);
  CHECK(o.weights_hash == network_hash(init));
  CHECK(o.final_val_loss == doctest::Approx(o.initial_val_loss));
}

TEST_CASE("revert after an extension restores the checkpoint bit for bit") {
  auto c = base_config();
  c.rel_tolerance = 0.05;
  c.max_G = 200;
  const auto o = optimize(wave_data(400, 6), {}, c, UnitCosts::synthetic_default());
  REQUIRE(o.trace.size() >= 2);
  REQUIRE(o.trace.back().decision == Decision::RevertStop);
  const auto& prev = o.trace[o.trace.size() - 2];
  CHECK(prev.decision == Decision::Extend);
  CHECK(o.weights_hash == prev.weights_hash);
  CHECK(o.final_G == prev.G);
  CHECK(o.final_val_loss == prev.best_val_loss);
}

TEST_CASE("trace csv layout") {
  auto c = base_config();
  c.max_G = 10;
  const auto o = optimize(wave_data(200, 7), {}, c, UnitCosts::synthetic_default());
  const auto csv = trace_csv(o);
  CHECK(csv.rfind("step,G,val_loss,best_val_loss,area_mm2,energy_pj,latency_ns,decision\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(o.trace.size() + 1));
}

TEST_CASE("search config json") {
  const auto c = search_config_from_json({{"candidates", {{17, 14}}}, {"mode", "TD-A"}, {"G_init", 5}});
  CHECK(c.mode == EncoderMode::TdA);
  CHECK(c.train.loss == Loss::CrossEntropy);
  CHECK_THROWS_AS(search_config_from_json({{"candidates", {{17, 14}}}, {"mode", "x"}}), ConfigError);
  CHECK_THROWS_AS(search_config_from_json({{"G_init", 5}}), ConfigError);
  CHECK_THROWS_AS(search_config_from_json({{"candidates", {{17}}}}), ConfigError);
}
