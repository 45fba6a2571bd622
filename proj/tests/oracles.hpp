#pragma once

// Independent reference implementations used only by tests.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

namespace oracle {

// Textbook recursive Cox-de Boor on an explicit knot vector.
inline double cox_de_boor(const std::vector<double>& knots, int i, int k, double x) {
  if (k == 0) return (x >= knots[i] && x < knots[i + 1]) ? 1.0 : 0.0;
  double left = 0.0, right = 0.0;
  const double dl = knots[i + k] - knots[i];
  const double dr = knots[i + k + 1] - knots[i + 1];
  if (dl != 0.0) left = (x - knots[i]) / dl * cox_de_boor(knots, i, k - 1, x);
  if (dr != 0.0) right = (knots[i + k + 1] - x) / dr * cox_de_boor(knots, i + 1, k - 1, x);
  return left + right;
}

// Uniform knots extended K steps past both ends of [lo, hi].
inline std::vector<double> extended_knots(int g, int k, double lo, double hi) {
  std::vector<double> t;
  const double h = (hi - lo) / g;
  for (int j = -k; j <= g + k; ++j) t.push_back(lo + j * h);
  return t;
}

// B_i(x) on the extended grid; x == hi is evaluated from the left.
inline double basis(int g, int k, double lo, double hi, int i, double x) {
  const auto t = extended_knots(g, k, lo, hi);
  if (x >= hi) x = std::nextafter(hi, lo);
  return cox_de_boor(t, i, k, x);
}

// Dense nodal analysis in physical units. Cell p joins a source at
// drive[p]*v_read to node p; segments of r_wire join nodes p-1 and p; node 0 is
// tied to the clamp at 0 V. Returns the clamp current in uA.
inline double dense_clamp_current(const std::vector<double>& g_us, const std::vector<double>& drive,
                           double r_wire, double v_read) {
  const int n = static_cast<int>(g_us.size());
  const double gs = 1.0 / r_wire;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  m(0, 0) = 1.0;  // v0 = 0
  for (int p = 1; p < n; ++p) {
    const double g = g_us[p] * 1e-6;
    m(p, p) += g + gs;
    m(p, p - 1) -= gs;
    if (p + 1 < n) {
      m(p, p) += gs;
      m(p, p + 1) -= gs;
    }
    b(p) = g * drive[p] * v_read;
  }
  const Eigen::VectorXd v = m.fullPivLu().solve(b);
  double i = g_us[0] * 1e-6 * drive[0] * v_read;
  if (n > 1) i += (v(1) - v(0)) * gs;
  return i * 1e6;
}

// Cardinal cubic B-spline on knots 0..4 from its closed-form pieces.
inline double cubic_cardinal(double s) {
  if (s < 0.0 || s >= 4.0) return 0.0;
  if (s < 1.0) return s * s * s / 6.0;
  if (s < 2.0) return (-3 * s * s * s + 12 * s * s - 12 * s + 4) / 6.0;
  if (s < 3.0) return (3 * s * s * s - 24 * s * s + 60 * s - 44) / 6.0;
  const double r = 4.0 - s;
  return r * r * r / 6.0;
}

}  // namespace oracle
