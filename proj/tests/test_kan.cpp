#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "kanedge/error.hpp"
#include "kanedge/json_util.hpp"
#include "kanedge/kan.hpp"
#include "kanedge/model_io.hpp"
#include "kanedge/train.hpp"
#include "oracles.hpp"

using namespace kanedge;

namespace {

// Brute force over every (input, basis) pair using the extended-knot oracle.
std::vector<double> brute_layer(const KanLayer& l, std::span<const double> x) {
  const auto& g = l.grid();
  std::vector<double> y(l.n_out(), 0.0);
  for (int o = 0; o < l.n_out(); ++o)
    for (int in = 0; in < l.n_in(); ++in) {
      y[o] += l.w_b(in, o) * std::max(0.0, x[in]);
      for (int i = 0; i < l.basis_count(); ++i)
        y[o] += l.c(in, o, i) * oracle::basis(g.intervals, g.degree, g.x_min, g.x_max, i, x[in]);
    }
  return y;
}

std::vector<double> random_inputs(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

}  // namespace

TEST_CASE("layer_forward basics") {
  KanLayer zero(3, 2, SplineGrid(5, 3, -1, 1));
  const std::vector<double> x = {0.1, -0.5, 0.9};
  for (double v : layer_forward(zero, x)) CHECK(v == 0.0);

  KanLayer ones(1, 1, SplineGrid(5, 3, -1, 1));
  for (auto& c : ones.coefficients()) c = 1.0;
  for (double xv = -1.0; xv <= 1.0; xv += 0.01) {
    const double in[] = {xv};
    CHECK(layer_forward(ones, in)[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(layer_forward(zero, std::vector<double>{0.1}), ArgumentError);
}

TEST_CASE("layer_forward matches brute force") {
  std::mt19937_64 rng(21);
  const int widths[] = {4, 3};
  const auto net = random_network(widths, SplineGrid(5, 3, -1, 1), 1.0, 99);
  for (int rep = 0; rep < 50; ++rep) {
    const auto x = random_inputs(rng, 4, -1, 1);
    const auto y = layer_forward(net.layers[0], x);
    const auto ref = brute_layer(net.layers[0], x);
    for (int o = 0; o < 3; ++o) CHECK(y[o] == doctest::Approx(ref[o]).epsilon(1e-12));
  }
}

TEST_CASE("network_forward composes layers with clamping") {
  std::mt19937_64 rng(8);
  const int widths[] = {17, 1, 14};
  const auto net = random_network(widths, SplineGrid(5, 3, -1, 1), 1.0, 5);
  CHECK(net.parameter_count() == 279);
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = random_inputs(rng, 17, -1, 1);
    auto hidden = brute_layer(net.layers[0], x);
    for (auto& h : hidden) h = std::clamp(h, -1.0, 1.0);
    const auto ref = brute_layer(net.layers[1], hidden);
    const auto y = network_forward(net, x);
    for (int o = 0; o < 14; ++o) CHECK(y[o] == doctest::Approx(ref[o]).epsilon(1e-11));
  }

  KanNetwork single{{net.layers[0]}};
  const auto x = random_inputs(rng, 17, -1, 1);
  CHECK(network_forward(single, x) == layer_forward(net.layers[0], x));

  KanNetwork zeros{{KanLayer(17, 1, SplineGrid(5, 3, -1, 1)), KanLayer(1, 14, SplineGrid(5, 3, -1, 1))}};
  for (double v : network_forward(zeros, x)) CHECK(v == 0.0);

  KanNetwork broken{{KanLayer(17, 2, SplineGrid(5, 3, -1, 1)), KanLayer(1, 14, SplineGrid(5, 3, -1, 1))}};
  CHECK_THROWS_AS(network_forward(broken, x), ArgumentError);
  CHECK_THROWS_AS(KanNetwork{}.validate(), ArgumentError);
}

TEST_CASE("layer gradients") {
  std::mt19937_64 rng(4);
  const int widths[] = {3, 2};
  const auto net = random_network(widths, SplineGrid(4, 3, -1, 1), 1.0, 12);
  const auto& layer = net.layers[0];
  const auto x = random_inputs(rng, 3, -0.9, 0.9);

  const std::vector<double> zero_up = {0.0, 0.0};
  const auto g0 = layer_gradients(layer, x, zero_up);
  for (double v : g0.c) CHECK(v == 0.0);
  for (double v : g0.w_b) CHECK(v == 0.0);
  for (double v : g0.x) CHECK(v == 0.0);

  const std::vector<double> up = {0.7, -1.3};
  const auto g = layer_gradients(layer, x, up);
  for (int in = 0; in < 3; ++in)
    for (int o = 0; o < 2; ++o)
      for (int i = 0; i < layer.basis_count(); ++i)
        CHECK(g.c[(in * 2 + o) * layer.basis_count() + i] ==
              doctest::Approx(up[o] * basis_eval(layer.grid(), i, x[in])).epsilon(1e-12));
}

TEST_CASE("least-squares fitting") {
  const SplineGrid grid(5, 3, -1, 1);
  std::vector<FitSample> ones;
  for (int s = 0; s < 200; ++s) ones.push_back({-1.0 + 2.0 * s / 199, 1.0});
  for (double c : fit_edge_least_squares(grid, ones)) CHECK(c == doctest::Approx(1.0).epsilon(1e-9));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2, 2);
  KanLayer edge(1, 1, grid);
  for (auto& c : edge.coefficients()) c = u(rng);
  std::vector<FitSample> samples;
  for (int s = 0; s < 500; ++s) {
    const double x = -1.0 + 2.0 * s / 499;
    samples.push_back({x, edge.edge_spline(0, 0, x)});
  }
  const auto fit = fit_edge_least_squares(grid, samples);
  for (int i = 0; i < grid.basis_count(); ++i)
    CHECK(std::abs(fit[i] - edge.c(0, 0, i)) <= 1e-9);

  const std::vector<FitSample> few = {{-0.5, 1}, {0.0, 2}, {0.5, 3}};
  CHECK_THROWS_AS(fit_edge_least_squares(grid, few), SingularFitError);

  // Samples only on the left half leave right-hand bases uncovered.
  std::vector<FitSample> left;
  for (int s = 0; s < 100; ++s) left.push_back({-1.0 + 0.5 * s / 99, 0.0});
  try {
    fit_edge_least_squares(grid, left);
    FAIL("expected singular fit");
  } catch (const SingularFitError& e) {
    CHECK(!e.basis().empty());
    CHECK(e.basis().back() == 7);
  }
}

TEST_CASE("grid extension preserves the spline") {
  std::mt19937_64 rng(17);
  const int widths[] = {2, 2};
  auto net = random_network(widths, SplineGrid(5, 3, -1, 1), 1.0, 3);
  const auto& old = net.layers[0];
  CHECK(grid_extend(old, 5) == old);
  CHECK_THROWS_AS(grid_extend(old, 4), ArgumentError);

  const auto ext = grid_extend(old, 10);
  CHECK(ext.grid().intervals == 10);
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const double x = -1.0 + 2.0 * s / 999;
    for (int in = 0; in < 2; ++in)
      for (int o = 0; o < 2; ++o)
        worst = std::max(worst, std::abs(ext.edge_spline(in, o, x) - old.edge_spline(in, o, x)));
  }
  CHECK(worst <= 1e-6);
  for (int in = 0; in < 2; ++in)
    for (int o = 0; o < 2; ++o) CHECK(ext.w_b(in, o) == old.w_b(in, o));

  for (int rep = 0; rep < 100; ++rep) {
    const auto x = random_inputs(rng, 2, -1, 1);
    const auto a = layer_forward(old, x), b = layer_forward(ext, x);
    for (int o = 0; o < 2; ++o) CHECK(std::abs(a[o] - b[o]) <= 1e-6);
  }
}

TEST_CASE("training") {
  Dataset data;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int s = 0; s < 200; ++s) {
    const double x[] = {u(rng)};
    const double y[] = {std::sin(M_PI * x[0])};
    data.add(x, y);
  }
  const auto [tr, va] = split(data, 150);
  KanNetwork net{{KanLayer(1, 1, SplineGrid(14, 3, -1, 1))}};
  CHECK(net.layers[0].basis_count() == 17);

  TrainConfig cfg;
  cfg.epochs = 0;
  CHECK(train(net, tr, va, cfg).net == net);

  cfg.epochs = 30;
  cfg.learning_rate = 0.5;
  cfg.batch_size = 16;
  cfg.seed = 42;
  const auto a = train(net, tr, va, cfg);
  CHECK(a.train_loss.size() == 30);
  CHECK(a.train_loss.back() < a.initial_train_loss);
  CHECK(a.val_loss.back() < a.initial_val_loss);
  const auto b = train(net, tr, va, cfg);
  CHECK(a.train_loss == b.train_loss);
  CHECK(a.val_loss == b.val_loss);

  cfg.learning_rate = 1e6;
  CHECK_THROWS_AS(train(net, tr, va, cfg), TrainingDivergedError);
}

TEST_CASE("model file round trip is bit identical") {
  const int widths[] = {17, 1, 14};
  const auto net = random_network(widths, SplineGrid(5, 3, -1, 1), 1.0, 77);
  const auto dir = std::filesystem::temp_directory_path() / "kanedge_model_io";
  std::filesystem::create_directories(dir);
  save_model(net, dir / "m.json");
  const auto back = load_model(dir / "m.json");
  CHECK(back == net);
  save_model(back, dir / "m2.json");
  CHECK(read_text(dir / "m.json") == read_text(dir / "m2.json"));

  auto doc = model_to_json(net);
  doc["version"] = 99;
  CHECK_THROWS_AS(model_from_json(doc), ConfigError);
  doc = model_to_json(net);
  doc["layers"][0]["c"].erase(0);
  CHECK_THROWS_AS(model_from_json(doc), ConfigError);
}

namespace {

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-3});
}

// Nudges x away from 0 and from knot boundaries so the objective is smooth
// within one finite-difference step.
double smooth_point(const SplineGrid& g, double x) {
  const double u = (x - g.x_min) / g.step();
  const double frac = u - std::floor(u);
  if (frac < 1e-3 || frac > 1 - 1e-3) x += 2e-3 * g.step();
  if (std::abs(x) < 1e-3) x += 3e-3;
  return std::clamp(x, g.x_min + 1e-3, g.x_max - 1e-3);
}

}  // namespace

TEST_CASE("analytic gradients match central differences on 50 random layers") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> k_dist(2, 4), g_dist(3, 10), w_dist(1, 4);
  std::uniform_real_distribution<double> u(-1, 1);
  const double h = 1e-6;
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const SplineGrid grid(g_dist(rng), k_dist(rng), -1, 1);
    const int widths[] = {w_dist(rng), w_dist(rng)};
    auto net = random_network(widths, grid, 1.0, rng());
    auto& layer = net.layers[0];
    std::vector<double> x(layer.n_in()), up(layer.n_out());
    for (auto& v : x) v = smooth_point(grid, u(rng));
    for (auto& v : up) v = u(rng);
    auto objective = [&](const KanLayer& l, std::span<const double> xs) {
      const auto y = layer_forward(l, xs);
      double s = 0.0;
      for (int o = 0; o < l.n_out(); ++o) s += up[o] * y[o];
      return s;
    };
    const auto g = layer_gradients(layer, x, up);
    for (std::size_t i = 0; i < layer.coefficients().size(); ++i) {
      const double keep = layer.coefficients()[i];
      layer.coefficients()[i] = keep + h;
      const double fp = objective(layer, x);
      layer.coefficients()[i] = keep - h;
      const double fm = objective(layer, x);
      layer.coefficients()[i] = keep;
      worst = std::max(worst, relative_error(g.c[i], (fp - fm) / (2 * h)));
    }
    for (std::size_t i = 0; i < layer.residual_weights().size(); ++i) {
      const double keep = layer.residual_weights()[i];
      layer.residual_weights()[i] = keep + h;
      const double fp = objective(layer, x);
      layer.residual_weights()[i] = keep - h;
      const double fm = objective(layer, x);
      layer.residual_weights()[i] = keep;
      worst = std::max(worst, relative_error(g.w_b[i], (fp - fm) / (2 * h)));
    }
    for (int i = 0; i < layer.n_in(); ++i) {
      auto xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      worst = std::max(worst, relative_error(g.x[i], (objective(layer, xp) - objective(layer, xm)) / (2 * h)));
    }
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("runaway learning rate raises a divergence error") {
  SurrogateSpec s;
  s.samples = 200;
  const auto data = make_surrogate(s);
  const int w[] = {17, 1, 14};
  TrainConfig tc;
  tc.epochs = 5;
  tc.learning_rate = 1e12;
  tc.loss = Loss::SquaredError;
  CHECK_THROWS_AS(train(random_network(w, SplineGrid(5, 3, -1.0, 1.0), 0.1, 1), data, {}, tc),
                  TrainingDivergedError);
}
