#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "kanedge/spline.hpp"

namespace kanedge {

// One KAN layer: every (input, output) edge carries
//   phi(x) = w_b * relu(x) + sum_i c_i * B_i(x)
// with the spline weight already folded into c.
class KanLayer {
 public:
  KanLayer() = default;
  KanLayer(int n_in, int n_out, SplineGrid grid);

  int n_in() const noexcept { return n_in_; }
  int n_out() const noexcept { return n_out_; }
  const SplineGrid& grid() const noexcept { return grid_; }
  int basis_count() const noexcept { return grid_.basis_count(); }

  // Row-major n_in x n_out x (G+K).
  std::span<double> coefficients() noexcept { return c_; }
  std::span<const double> coefficients() const noexcept { return c_; }
  // Row-major n_in x n_out.
  std::span<double> residual_weights() noexcept { return w_b_; }
  std::span<const double> residual_weights() const noexcept { return w_b_; }

  double& c(int in, int out, int basis) noexcept {
    return c_[index(in, out, basis)];
  }
  double c(int in, int out, int basis) const noexcept {
    return c_[index(in, out, basis)];
  }
  double& w_b(int in, int out) noexcept { return w_b_[in * n_out_ + out]; }
  double w_b(int in, int out) const noexcept { return w_b_[in * n_out_ + out]; }

  // Edge spline (without residual) at x.
  double edge_spline(int in, int out, double x) const;

  std::size_t parameter_count() const noexcept {
    return c_.size() + w_b_.size();
  }

  // Shape and finiteness check; throws ArgumentError.
  void validate() const;

  bool operator==(const KanLayer&) const = default;

 private:
  std::size_t index(int in, int out, int basis) const noexcept {
    return (static_cast<std::size_t>(in) * n_out_ + out) * basis_count() +
           basis;
  }

  int n_in_ = 0;
  int n_out_ = 0;
  SplineGrid grid_;
  std::vector<double> c_;
  std::vector<double> w_b_;
};

struct KanNetwork {
  std::vector<KanLayer> layers;

  int n_in() const { return layers.front().n_in(); }
  int n_out() const { return layers.back().n_out(); }
  std::size_t parameter_count() const;
  // Throws ArgumentError on an empty network or a broken shape chain.
  void validate() const;

  bool operator==(const KanNetwork&) const = default;
};

double relu(double x) noexcept;

// x must already lie inside the layer domain.
std::vector<double> layer_forward(const KanLayer& layer,
                                  std::span<const double> x);

// Clamps every layer's input to that layer's domain before applying it.
std::vector<double> network_forward(const KanNetwork& net,
                                    std::span<const double> x);

struct LayerGradients {
  std::vector<double> c;    // same layout as KanLayer::coefficients()
  std::vector<double> w_b;  // same layout as KanLayer::residual_weights()
  std::vector<double> x;    // n_in
};

LayerGradients layer_gradients(const KanLayer& layer, std::span<const double> x,
                               std::span<const double> upstream);

// Accumulating variant used by the trainer: adds into grad (already sized).
void accumulate_layer_gradients(const KanLayer& layer,
                                std::span<const double> x,
                                std::span<const double> upstream,
                                LayerGradients& grad);

struct FitSample {
  double x = 0.0;
  double target = 0.0;
};

// Least-squares spline coefficients on `grid` for the given samples.
// Throws SingularFitError when the design matrix is rank deficient.
std::vector<double> fit_edge_least_squares(const SplineGrid& grid,
                                           std::span<const FitSample> samples);

// Refits every edge on a grid with `new_intervals` intervals over the same
// domain. Residual weights are copied unchanged.
KanLayer grid_extend(const KanLayer& layer, int new_intervals);
KanNetwork grid_extend(const KanNetwork& net, int new_intervals);

}  // namespace kanedge
