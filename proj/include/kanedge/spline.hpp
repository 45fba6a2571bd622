#pragma once

#include <cstddef>
#include <vector>

namespace kanedge {

// Uniform knot grid over [x_min, x_max] with `intervals` cells, extended by
// `degree` knots past each end so that there are intervals + degree basis
// functions, each a translate of the same cardinal B-spline.
struct SplineGrid {
  int intervals = 5;  // G
  int degree = 3;     // K
  double x_min = -1.0;
  double x_max = 1.0;

  SplineGrid() = default;
  SplineGrid(int g, int k, double lo, double hi);

  int basis_count() const noexcept { return intervals + degree; }
  double step() const noexcept { return (x_max - x_min) / intervals; }
  bool contains(double x) const noexcept { return x >= x_min && x <= x_max; }
  double clamp(double x) const noexcept;

  // Throws ArgumentError unless G >= 1, K >= 1, x_max > x_min, bounds finite.
  void validate() const;

  bool operator==(const SplineGrid&) const = default;
};

// Knot interval of x and fractional position inside it. x_max maps to the
// last interval with t = 1.
struct GridLocation {
  int interval = 0;
  double t = 0.0;
};

GridLocation locate(const SplineGrid& grid, double x);

// Cardinal B-spline of degree k on integer knots 0..k+1, evaluated by the
// Cox-de Boor recursion. Zero outside [0, k+1). k = 0 is the unit box.
double cardinal_bspline(int k, double s);

// C(m + t) for m in [0, K], t in [0, 1].
double cardinal_piece(int k, int m, double t);

// All K+1 pieces at once: out[m] = C(m + t).
void cardinal_pieces(int k, double t, double* out);

// B_i(x). Throws ArgumentError for x outside the domain or i out of range.
double basis_eval(const SplineGrid& grid, int i, double x);

// Nonzero bases at x: values[m] = B_{first + m}(x), m in [0, K].
struct ActiveBasis {
  int first = 0;
  std::vector<double> values;
};

ActiveBasis active_basis(const SplineGrid& grid, double x);

// dB_{first+m}/dx at x, same layout as active_basis().
ActiveBasis active_basis_derivative(const SplineGrid& grid, double x);

}  // namespace kanedge
