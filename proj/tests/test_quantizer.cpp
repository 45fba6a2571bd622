#include <cmath>
#include <random>

#include "doctest.h"
#include "kanedge/error.hpp"
#include "kanedge/quantizer.hpp"
#include "kanedge/train.hpp"
#include "oracles.hpp"

using namespace kanedge;

namespace {

int brute_max_ld(int g, int n) {
  int best = -1;
  for (int ld = 0; ld <= 30; ++ld)
    if (static_cast<long long>(g) << ld <= (1LL << n)) best = ld;
  return best;
}

// Mean |quantized - float| at cell midpoints over random code vectors.
double mean_forward_error(const KanLayer& layer, int n_bits, int out_bits, int samples,
                          std::uint64_t seed) {
  const auto cfg = HaqConfig::for_grid(layer.grid(), n_bits, out_bits, true);
  const auto lut = build_sh_lut(cfg.degree, cfg.ld, cfg.out_bits);
  const auto q = quantize_layer(layer);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> code(0, cfg.code_count() - 1);
  double total = 0.0;
  std::size_t count = 0;
  std::vector<std::uint32_t> codes(layer.n_in());
  std::vector<double> mid(layer.n_in());
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < layer.n_in(); ++i) {
      codes[i] = code(rng);
      mid[i] = code_midpoint(codes[i], layer.grid(), cfg);
    }
    const auto yq = quantized_layer_forward(q, codes, lut, cfg);
    const auto yf = layer_forward(layer, mid);
    for (int o = 0; o < layer.n_out(); ++o) total += std::abs(yq[o] - yf[o]);
    count += layer.n_out();
  }
  return total / count;
}

}  // namespace

TEST_CASE("max_ld matches brute force") {
  CHECK(max_ld(5, 8) == 5);
  CHECK(max_ld(8, 8) == 5);
  CHECK(max_ld(64, 8) == 2);
  CHECK_THROWS_AS(max_ld(300, 8), InfeasibleError);
  for (int n = 4; n <= 12; ++n)
    for (int g = 1; g <= 256; ++g) {
      const int ref = brute_max_ld(g, n);
      if (ref < 0) {
        CHECK_THROWS_AS(max_ld(g, n), InfeasibleError);
      } else {
        CHECK(max_ld(g, n) == ref);
      }
    }
}

TEST_CASE("max_ld monotonicity") {
  for (int n = 4; n <= 12; ++n)
    for (int g = 1; g < (1 << n); ++g) {
      CHECK(max_ld(g + 1, n) <= max_ld(g, n));
      CHECK(max_ld(g, n + 1) >= max_ld(g, n));
    }
}

TEST_CASE("alignment predicates") {
  CHECK(check_alignment(5, 51, 8));
  CHECK_FALSE(is_power_of_two(51));
  CHECK(check_alignment(5, 32, 8));
  CHECK(is_power_of_two(32));
  CHECK_FALSE(check_alignment(5, 64, 8));
}

TEST_CASE("quantize_input aligns knot and code grids") {
  for (int g : {3, 5, 7, 15, 30, 60}) {
    const SplineGrid grid(g, 3, -1.0, 1.0);
    const auto cfg = HaqConfig::for_grid(grid, 8, 6, true);
    CHECK(quantize_input(grid.x_min, grid, cfg) == 0);
    CHECK(quantize_input(grid.x_max + 1, grid, cfg) == cfg.code_count() - 1);
    CHECK(quantize_input(grid.x_min - 1, grid, cfg) == 0);
    for (int j = 0; j < g; ++j) {
      const double knot = grid.x_min + j * grid.step();
      CHECK(quantize_input(knot, grid, cfg) == static_cast<std::uint32_t>(j) << cfg.ld);
    }
    CHECK(quantize_input(0.0, grid, cfg) == cfg.code_count() / 2);
  }
  const SplineGrid grid(5, 3, 0.0, 1.0);
  CHECK_THROWS_AS(quantize_input(NAN, grid, HaqConfig::for_grid(grid)), ArgumentError);
}

TEST_CASE("split_index") {
  CHECK(split_index(150, 5).global == 4);
  CHECK(split_index(150, 5).local == 22);
  CHECK(split_index(0, 5).global == 0);
  CHECK(split_index(0, 5).local == 0);
  CHECK(split_index(159, 5).global == 4);
  CHECK(split_index(159, 5).local == 31);
  for (std::uint32_t code = 0; code < 160; ++code) {
    const auto s = split_index(code, 5);
    CHECK((s.global << 5) + s.local == code);
  }
}

TEST_CASE("SH-LUT layout and hemi access") {
  const auto lut = build_sh_lut(3, 5, 6);
  CHECK(lut.stored_pieces() == 2);
  CHECK(lut.stored_entries() == 64);
  for (std::uint32_t l = 0; l < 32; ++l) {
    const double t_mid = (l + 0.5) / 32.0;
    const std::vector<double> unit = {0, 1, 2, 3, 4};
    CHECK(lut.entry(0, l) == static_cast<std::uint32_t>(std::nearbyint(63.0 * oracle::cox_de_boor(unit, 0, 3, 3 + t_mid))));
    CHECK(lut.lookup(3, l) == lut.lookup(0, 31 - l));
  }
  CHECK(build_sh_lut(2, 4, 6).stored_pieces() == 2);
  CHECK(build_sh_lut(4, 4, 6).stored_pieces() == 3);
  CHECK_THROWS_AS(build_sh_lut(3, 5, 0), ArgumentError);

  for (int k : {2, 3, 4})
    for (int ld = 0; ld <= 6; ++ld) {
      const auto t = build_sh_lut(k, ld, 8);
      std::vector<double> knots;
      for (int j = 0; j <= k + 1; ++j) knots.push_back(j);
      for (std::uint32_t l = 0; l < t.cells(); ++l) {
        long long sum = 0;
        for (int m = 0; m <= k; ++m) {
          const double t_mid = (l + 0.5) / static_cast<double>(1u << ld);
          const auto direct = static_cast<std::uint32_t>(
              std::nearbyint(255.0 * oracle::cox_de_boor(knots, 0, k, k - m + t_mid)));
          CHECK(t.lookup(m, l) == direct);
          CHECK(t.lookup(m, l) == t.lookup(k - m, t.cells() - 1 - l));
          sum += t.lookup(m, l);
        }
        CHECK(std::abs(sum - 255) <= (k + 1) / 2.0);
      }
    }
}

TEST_CASE("retrieve_b_values") {
  const SplineGrid grid(5, 3, 0.0, 1.0);
  const auto cfg = HaqConfig::for_grid(grid, 8, 6);
  const auto lut = build_sh_lut(3, cfg.ld, 6);
  const auto zero = retrieve_b_values(0, lut, cfg);
  CHECK(zero.global == 0);
  CHECK(zero.levels.size() == 4);
  for (int m = 0; m < 4; ++m) CHECK(zero.levels[m] == lut.lookup(m, 0));
  for (std::uint32_t code = 0; code < cfg.code_count(); ++code) {
    const auto a = retrieve_b_values(code, lut, cfg);
    CHECK(a.levels.size() == 4);
    const double mid = code_midpoint(code, grid, cfg);
    for (int m = 0; m < 4; ++m)
      CHECK(std::abs(a.levels[m] / 63.0 - basis_eval(grid, a.global + m, mid)) <= 0.5 / 63 + 1e-12);
  }
  auto wrong = cfg;
  wrong.out_bits = 8;
  CHECK_THROWS_AS(retrieve_b_values(0, lut, wrong), ConfigError);
}

TEST_CASE("quantized forward") {
  const SplineGrid grid(5, 3, -1.0, 1.0);
  KanLayer zero(4, 3, grid);
  const auto cfg = HaqConfig::for_grid(grid, 8, 8, true);
  const auto lut = build_sh_lut(3, cfg.ld, 8);
  const std::vector<std::uint32_t> codes = {0, 40, 80, 159};
  for (double v : quantized_layer_forward(zero, codes, lut, cfg)) CHECK(v == 0.0);

  const int widths[] = {4, 4};
  const auto net = random_network(widths, grid, 1.0, 31);
  LookupTrace trace;
  quantized_layer_forward(net.layers[0], codes, lut, cfg, &trace);
  CHECK(trace.lut_ids.size() == 1);
  CHECK(trace.lookups == 16);

  const double e8 = mean_forward_error(net.layers[0], 8, 8, 1000, 5);
  CHECK(e8 <= 2e-2);
  double prev = 1e9;
  for (int b : {4, 6, 8, 10, 12}) {
    const double e = mean_forward_error(net.layers[0], 8, b, 1000, 5);
    CHECK(e < prev);
    prev = e;
  }

  const SplineGrid other(6, 3, -1.0, 1.0);
  CHECK_THROWS_AS(quantized_layer_forward(KanLayer(4, 3, other), codes, lut, cfg), ConfigError);
}
