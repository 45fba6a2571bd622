#include "kanedge/kan.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "kanedge/error.hpp"

namespace kanedge {

KanLayer::KanLayer(int n_in, int n_out, SplineGrid grid)
    : n_in_(n_in), n_out_(n_out), grid_(grid) {
  if (n_in < 1 || n_out < 1)
    throw ArgumentError("KanLayer: n_in and n_out must be positive");
  grid_.validate();
  c_.assign(static_cast<std::size_t>(n_in) * n_out * grid_.basis_count(), 0.0);
  w_b_.assign(static_cast<std::size_t>(n_in) * n_out, 0.0);
}

double KanLayer::edge_spline(int in, int out, double x) const {
  const auto active = active_basis(grid_, x);
  double acc = 0.0;
  for (int m = 0; m <= grid_.degree; ++m)
    acc += c(in, out, active.first + m) * active.values[m];
  return acc;
}

void KanLayer::validate() const {
  grid_.validate();
  if (n_in_ < 1 || n_out_ < 1)
    throw ArgumentError("KanLayer: n_in and n_out must be positive");
  if (c_.size() !=
      static_cast<std::size_t>(n_in_) * n_out_ * grid_.basis_count())
    throw ArgumentError("KanLayer: coefficient tensor does not match G+K");
  if (w_b_.size() != static_cast<std::size_t>(n_in_) * n_out_)
    throw ArgumentError("KanLayer: residual weights do not match n_in x n_out");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(c_.begin(), c_.end(), finite) ||
      !std::all_of(w_b_.begin(), w_b_.end(), finite))
    throw ArgumentError("KanLayer: non-finite parameter");
}

std::size_t KanNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.parameter_count();
  return n;
}

void KanNetwork::validate() const {
  if (layers.empty()) throw ArgumentError("KanNetwork: no layers");
  for (std::size_t t = 0; t < layers.size(); ++t) {
    layers[t].validate();
    if (t + 1 < layers.size() && layers[t].n_out() != layers[t + 1].n_in())
      throw ArgumentError("KanNetwork: layer " + std::to_string(t) +
                          " n_out does not match layer " +
                          std::to_string(t + 1) + " n_in");
  }
}

double relu(double x) noexcept { return x > 0.0 ? x : 0.0; }

std::vector<double> layer_forward(const KanLayer& layer,
                                  std::span<const double> x) {
  if (static_cast<int>(x.size()) != layer.n_in())
    throw ArgumentError("layer_forward: expected " +
                        std::to_string(layer.n_in()) + " inputs, got " +
                        std::to_string(x.size()));
  const int k = layer.grid().degree;
  std::vector<double> y(layer.n_out(), 0.0);
  for (int in = 0; in < layer.n_in(); ++in) {
    if (!std::isfinite(x[in]))
      throw ArgumentError("layer_forward: non-finite input");
    const auto active = active_basis(layer.grid(), x[in]);
    const double r = relu(x[in]);
    for (int out = 0; out < layer.n_out(); ++out) {
      double acc = layer.w_b(in, out) * r;
      for (int m = 0; m <= k; ++m)
        acc += layer.c(in, out, active.first + m) * active.values[m];
      y[out] += acc;
    }
  }
  return y;
}

std::vector<double> network_forward(const KanNetwork& net,
                                    std::span<const double> x) {
  net.validate();
  std::vector<double> act(x.begin(), x.end());
  for (const auto& layer : net.layers) {
    for (auto& v : act) v = layer.grid().clamp(v);
    act = layer_forward(layer, act);
  }
  return act;
}

void accumulate_layer_gradients(const KanLayer& layer,
                                std::span<const double> x,
                                std::span<const double> upstream,
                                LayerGradients& grad) {
  const int k = layer.grid().degree;
  const int nb = layer.basis_count();
  for (int in = 0; in < layer.n_in(); ++in) {
    const auto active = active_basis(layer.grid(), x[in]);
    const auto slope = active_basis_derivative(layer.grid(), x[in]);
    const double r = relu(x[in]);
    const double r_slope = x[in] > 0.0 ? 1.0 : 0.0;
    double gx = 0.0;
    for (int out = 0; out < layer.n_out(); ++out) {
      const double u = upstream[out];
      if (u == 0.0) continue;
      const std::size_t edge = static_cast<std::size_t>(in) * layer.n_out() + out;
      grad.w_b[edge] += u * r;
      double dphi = layer.w_b(in, out) * r_slope;
      double* gc = grad.c.data() + edge * nb + active.first;
      for (int m = 0; m <= k; ++m) {
        gc[m] += u * active.values[m];
        dphi += layer.c(in, out, active.first + m) * slope.values[m];
      }
      gx += u * dphi;
    }
    grad.x[in] += gx;
  }
}

LayerGradients layer_gradients(const KanLayer& layer, std::span<const double> x,
                               std::span<const double> upstream) {
  if (static_cast<int>(x.size()) != layer.n_in() ||
      static_cast<int>(upstream.size()) != layer.n_out())
    throw ArgumentError("layer_gradients: shape mismatch");
  LayerGradients g{std::vector<double>(layer.coefficients().size(), 0.0),
                   std::vector<double>(layer.residual_weights().size(), 0.0),
                   std::vector<double>(layer.n_in(), 0.0)};
  accumulate_layer_gradients(layer, x, upstream, g);
  return g;
}

namespace {

// Column-pivoted QR of the B-spline design matrix at fixed sample positions,
// reusable across any number of target vectors.
class SplineLeastSquares {
 public:
  SplineLeastSquares(const SplineGrid& grid, std::span<const double> xs) {
    grid.validate();
    const int nb = grid.basis_count();
    const int k = grid.degree;
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(xs.size(), nb);
    std::vector<int> support_hits(nb, 0);
    for (std::size_t s = 0; s < xs.size(); ++s) {
      const auto active = active_basis(grid, grid.clamp(xs[s]));
      for (int m = 0; m <= k; ++m) {
        design(s, active.first + m) = active.values[m];
        if (active.values[m] != 0.0) ++support_hits[active.first + m];
      }
    }

    std::vector<std::size_t> uncovered;
    for (int i = 0; i < nb; ++i)
      if (support_hits[i] == 0) uncovered.push_back(i);
    if (!uncovered.empty() || static_cast<int>(xs.size()) < nb) {
      if (uncovered.empty()) {
        for (int i = static_cast<int>(xs.size()); i < nb; ++i)
          uncovered.push_back(i);
      }
      throw SingularFitError("fit_edge_least_squares: " +
                                 std::to_string(xs.size()) +
                                 " samples cannot determine " +
                                 std::to_string(nb) + " coefficients",
                             uncovered);
    }

    qr_.setThreshold(1e-12);
    qr_.compute(design);
    if (qr_.rank() < nb) {
      std::vector<std::size_t> dropped;
      const auto& perm = qr_.colsPermutation().indices();
      for (int i = static_cast<int>(qr_.rank()); i < nb; ++i)
        dropped.push_back(static_cast<std::size_t>(perm(i)));
      std::sort(dropped.begin(), dropped.end());
      throw SingularFitError("fit_edge_least_squares: rank-deficient design",
                             dropped);
    }
  }

  // targets: samples x edges, result: basis x edges.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& targets) const {
    return qr_.solve(targets);
  }

 private:
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
};

}  // namespace

std::vector<double> fit_edge_least_squares(const SplineGrid& grid,
                                           std::span<const FitSample> samples) {
  std::vector<double> xs(samples.size());
  Eigen::MatrixXd rhs(samples.size(), 1);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    xs[s] = samples[s].x;
    rhs(s, 0) = samples[s].target;
  }
  const SplineLeastSquares fit(grid, xs);
  const Eigen::MatrixXd sol = fit.solve(rhs);
  return {sol.data(), sol.data() + sol.rows()};
}

KanLayer grid_extend(const KanLayer& layer, int new_intervals) {
  const auto& old = layer.grid();
  if (new_intervals < old.intervals)
    throw ArgumentError("grid_extend: new G must not be smaller than current G");
  if (new_intervals == old.intervals) return layer;

  SplineGrid grid(new_intervals, old.degree, old.x_min, old.x_max);
  KanLayer out(layer.n_in(), layer.n_out(), grid);
  // Dense samples including both domain ends, several per new cell.
  const int count = std::max(1000, 20 * grid.basis_count());
  std::vector<double> xs(count);
  for (int s = 0; s < count; ++s)
    xs[s] = old.x_min + (old.x_max - old.x_min) * s / (count - 1);

  const int edges = layer.n_in() * layer.n_out();
  Eigen::MatrixXd targets(count, edges);
  for (int in = 0; in < layer.n_in(); ++in)
    for (int o = 0; o < layer.n_out(); ++o)
      for (int s = 0; s < count; ++s)
        targets(s, in * layer.n_out() + o) = layer.edge_spline(in, o, xs[s]);

  const SplineLeastSquares fit(grid, xs);
  const Eigen::MatrixXd coef = fit.solve(targets);
  for (int in = 0; in < layer.n_in(); ++in) {
    for (int o = 0; o < layer.n_out(); ++o) {
      for (int i = 0; i < grid.basis_count(); ++i)
        out.c(in, o, i) = coef(i, in * layer.n_out() + o);
      out.w_b(in, o) = layer.w_b(in, o);
    }
  }
  return out;
}

KanNetwork grid_extend(const KanNetwork& net, int new_intervals) {
  KanNetwork out;
  out.layers.reserve(net.layers.size());
  for (const auto& l : net.layers) out.layers.push_back(grid_extend(l, new_intervals));
  return out;
}

}  // namespace kanedge
