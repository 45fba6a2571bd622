#include "kanedge/spline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kanedge/error.hpp"

namespace kanedge {

SplineGrid::SplineGrid(int g, int k, double lo, double hi)
    : intervals(g), degree(k), x_min(lo), x_max(hi) {}

double SplineGrid::clamp(double x) const noexcept {
  return std::clamp(x, x_min, x_max);
}

void SplineGrid::validate() const {
  if (intervals < 1) throw ArgumentError("spline grid: G must be >= 1");
  if (degree < 1) throw ArgumentError("spline grid: K must be >= 1");
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min))
    throw ArgumentError("spline grid: require finite x_min < x_max");
}

GridLocation locate(const SplineGrid& grid, double x) {
  const double u = (x - grid.x_min) / grid.step();
  int j = static_cast<int>(std::floor(u));
  j = std::clamp(j, 0, grid.intervals - 1);
  return {j, std::clamp(u - j, 0.0, 1.0)};
}

double cardinal_bspline(int k, double s) {
  if (k < 0) throw ArgumentError("cardinal_bspline: negative degree");
  if (!(s >= 0.0) || s >= k + 1) return 0.0;
  // Triangular Cox-de Boor table on knots 0, 1, ..., k+1.
  std::vector<double> n(static_cast<std::size_t>(k) + 1, 0.0);
  for (int i = 0; i <= k; ++i) n[i] = (s >= i && s < i + 1) ? 1.0 : 0.0;
  for (int d = 1; d <= k; ++d) {
    for (int i = 0; i + d <= k; ++i) {
      n[i] = ((s - i) * n[i] + (i + d + 1 - s) * n[i + 1]) / d;
    }
  }
  return n[0];
}

double cardinal_piece(int k, int m, double t) {
  if (k < 1) throw ArgumentError("cardinal_piece: degree must be >= 1");
  if (m < 0 || m > k)
    throw ArgumentError("cardinal_piece: piece index " + std::to_string(m) +
                        " outside [0, " + std::to_string(k) + "]");
  if (!(t >= 0.0 && t <= 1.0))
    throw ArgumentError("cardinal_piece: t must lie in [0, 1]");
  // C is continuous for k >= 1, so the right end of the last piece is 0.
  if (m == k && t == 1.0) return 0.0;
  return cardinal_bspline(k, m + t);
}

void cardinal_pieces(int k, double t, double* out) {
  // Standard uniform de Boor triangle: after step d, b[j] holds the value of
  // the degree-d cardinal spline at (d - j) + t.
  std::vector<double> b(static_cast<std::size_t>(k) + 1, 0.0);
  b[0] = 1.0;
  for (int d = 1; d <= k; ++d) {
    double saved = 0.0;
    for (int j = 0; j < d; ++j) {
      const double left = t + (d - 1 - j);  // distance from left knot
      const double right = (j + 1) - t;     // distance to right knot
      const double term = b[j] / d;
      b[j] = saved + right * term;
      saved = left * term;
    }
    b[d] = saved;
  }
  // b[j] = C_k(k - j + t)  ->  out[m] = C_k(m + t) = b[k - m]
  for (int m = 0; m <= k; ++m) out[m] = b[k - m];
}

double basis_eval(const SplineGrid& grid, int i, double x) {
  if (i < 0 || i >= grid.basis_count())
    throw ArgumentError("basis_eval: basis index " + std::to_string(i) +
                        " out of range");
  if (!grid.contains(x)) throw ArgumentError("basis_eval: x outside domain");
  const auto loc = locate(grid, x);
  const int m = i - loc.interval;
  if (m < 0 || m > grid.degree) return 0.0;
  return cardinal_piece(grid.degree, grid.degree - m, loc.t);
}

ActiveBasis active_basis(const SplineGrid& grid, double x) {
  const auto loc = locate(grid, x);
  const int k = grid.degree;
  ActiveBasis out{loc.interval, std::vector<double>(k + 1)};
  std::vector<double> pieces(k + 1);
  cardinal_pieces(k, loc.t, pieces.data());
  for (int m = 0; m <= k; ++m) out.values[m] = pieces[k - m];
  return out;
}

ActiveBasis active_basis_derivative(const SplineGrid& grid, double x) {
  // C_k'(s) = C_{k-1}(s) - C_{k-1}(s - 1) on unit knots; chain rule adds 1/h.
  const auto loc = locate(grid, x);
  const int k = grid.degree;
  ActiveBasis out{loc.interval, std::vector<double>(k + 1)};
  std::vector<double> lower(k, 0.0);
  if (k >= 1) cardinal_pieces(k - 1, loc.t, lower.data());
  auto low = [&](int piece) {
    return (piece >= 0 && piece < k) ? lower[piece] : 0.0;
  };
  const double inv_h = 1.0 / grid.step();
  for (int m = 0; m <= k; ++m) {
    const int piece = k - m;  // s = piece + t
    out.values[m] = (low(piece) - low(piece - 1)) * inv_h;
  }
  return out;
}

}  // namespace kanedge
