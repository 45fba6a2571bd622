#include <cmath>
#include <random>

#include "doctest.h"
#include "kanedge/error.hpp"
#include "kanedge/spline.hpp"
#include "oracles.hpp"

using namespace kanedge;

TEST_CASE("cardinal cubic pieces match the recursion oracle") {
  const std::vector<double> unit = {0, 1, 2, 3, 4};
  CHECK(cardinal_piece(3, 1, 0.0) == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(cardinal_piece(3, 2, 0.0) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(cardinal_piece(3, 1, 0.5) == doctest::Approx(23.0 / 48).epsilon(1e-12));
  CHECK(cardinal_piece(3, 0, 0.0) == 0.0);
  CHECK(oracle::cox_de_boor(unit, 0, 3, 1.5) == doctest::Approx(23.0 / 48).epsilon(1e-14));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 1; k <= 5; ++k) {
    std::vector<double> knots;
    for (int j = 0; j <= k + 1; ++j) knots.push_back(j);
    for (int rep = 0; rep < 200; ++rep) {
      const double t = u(rng);
      std::vector<double> all(k + 1);
      cardinal_pieces(k, t, all.data());
      for (int m = 0; m <= k; ++m) {
        const double ref = oracle::cox_de_boor(knots, 0, k, m + t);
        CHECK(cardinal_piece(k, m, t) == doctest::Approx(ref).epsilon(1e-13));
        CHECK(all[m] == doctest::Approx(ref).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("cardinal_piece rejects out-of-range arguments") {
  CHECK_THROWS_AS(cardinal_piece(3, 4, 0.5), ArgumentError);
  CHECK_THROWS_AS(cardinal_piece(3, -1, 0.5), ArgumentError);
  CHECK_THROWS_AS(cardinal_piece(3, 1, 1.5), ArgumentError);
  CHECK_THROWS_AS(cardinal_piece(3, 1, -0.1), ArgumentError);
}

TEST_CASE("pieces are mirror symmetric") {
  for (int k = 1; k <= 5; ++k)
    for (int m = 0; m <= k; ++m)
      for (double t = 0.0; t <= 1.0; t += 0.0625)
        CHECK(cardinal_piece(k, m, t) ==
              doctest::Approx(cardinal_piece(k, k - m, 1.0 - t)).epsilon(1e-14));
}

TEST_CASE("basis_eval agrees with the extended-knot oracle") {
  std::mt19937_64 rng(11);
  for (int k : {1, 2, 3, 4}) {
    for (int g : {1, 3, 5, 8}) {
      const SplineGrid grid(g, k, -0.7, 1.3);
      std::uniform_real_distribution<double> u(grid.x_min, grid.x_max);
      for (int rep = 0; rep < 50; ++rep) {
        const double x = u(rng);
        int nonzero = 0;
        for (int i = 0; i < grid.basis_count(); ++i) {
          const double v = basis_eval(grid, i, x);
          CHECK(v == doctest::Approx(oracle::basis(g, k, grid.x_min, grid.x_max, i, x)).epsilon(1e-12));
          nonzero += v != 0.0;
        }
        CHECK(nonzero == k + 1);
      }
    }
  }
}

TEST_CASE("knot boundary values for G=5, K=3") {
  const SplineGrid grid(5, 3, 0.0, 1.0);
  const double x = 0.4;  // knot 2
  const auto a = active_basis(grid, x);
  CHECK(a.first == 2);
  CHECK(a.values[0] == doctest::Approx(1.0 / 6));
  CHECK(a.values[1] == doctest::Approx(2.0 / 3));
  CHECK(a.values[2] == doctest::Approx(1.0 / 6));
  CHECK(a.values[3] == doctest::Approx(0.0));
}

TEST_CASE("partition of unity and translation invariance") {
  std::mt19937_64 rng(3);
  for (int k : {2, 3, 4}) {
    for (int g : {3, 17, 64}) {
      const SplineGrid grid(g, k, -1.0, 1.0);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (int rep = 0; rep < 500; ++rep) {
        const auto a = active_basis(grid, u(rng));
        double s = 0.0;
        for (double v : a.values) s += v;
        CHECK(std::abs(s - 1.0) <= 1e-12);
      }
      CHECK(std::abs([&] {
              double s = 0.0;
              for (int i = 0; i < grid.basis_count(); ++i) s += basis_eval(grid, i, grid.x_max);
              return s;
            }() - 1.0) <= 1e-12);
      // Same fraction inside different intervals gives identical values.
      const double t = 0.37;
      const auto first = active_basis(grid, grid.x_min + t * grid.step());
      const auto last = active_basis(grid, grid.x_min + (g - 1 + t) * grid.step());
      for (int m = 0; m <= k; ++m)
        CHECK(first.values[m] == doctest::Approx(last.values[m]).epsilon(1e-9));
    }
  }
}

TEST_CASE("basis_eval rejects out-of-domain x") {
  const SplineGrid grid(5, 3, 0.0, 1.0);
  CHECK_THROWS_AS(basis_eval(grid, 0, 1.5), ArgumentError);
  CHECK_THROWS_AS(basis_eval(grid, 8, 0.5), ArgumentError);
  CHECK_THROWS_AS(SplineGrid(0, 3, 0.0, 1.0).validate(), ArgumentError);
  CHECK_THROWS_AS(SplineGrid(5, 3, 1.0, 1.0).validate(), ArgumentError);
}

TEST_CASE("basis derivative matches central differences") {
  std::mt19937_64 rng(5);
  for (int k : {2, 3, 4}) {
    const SplineGrid grid(6, k, -1.0, 1.0);
    std::uniform_real_distribution<double> u(-0.99, 0.99);
    for (int rep = 0; rep < 100; ++rep) {
      const double x = u(rng);
      const auto d = active_basis_derivative(grid, x);
      for (int m = 0; m <= k; ++m) {
        const int i = d.first + m;
        const double step = 1e-6;
        const double fd = (oracle::basis(6, k, -1, 1, i, x + step) -
                           oracle::basis(6, k, -1, 1, i, x - step)) / (2 * step);
        CHECK(d.values[m] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
      }
    }
  }
}
