#include "kanedge/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "kanedge/error.hpp"

namespace kanedge {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ArgumentError("train: learning rate must be > 0");
  if (epochs < 0) throw ArgumentError("train: epochs must be >= 0");
  if (batch_size < 1) throw ArgumentError("train: batch size must be >= 1");
}

namespace {

struct ForwardTrace {
  std::vector<std::vector<double>> inputs;  // clamped input of each layer
  std::vector<std::vector<double>> passes;  // 1 where the clamp was inactive
  std::vector<double> output;
};

ForwardTrace traced_forward(const KanNetwork& net, std::span<const double> x) {
  ForwardTrace tr;
  std::vector<double> act(x.begin(), x.end());
  for (const auto& layer : net.layers) {
    std::vector<double> pass(act.size(), 1.0);
    for (std::size_t i = 0; i < act.size(); ++i) {
      const double c = layer.grid().clamp(act[i]);
      if (c != act[i]) pass[i] = 0.0;
      act[i] = c;
    }
    tr.inputs.push_back(act);
    tr.passes.push_back(std::move(pass));
    act = layer_forward(layer, act);
  }
  tr.output = std::move(act);
  return tr;
}

// Loss value and d(loss)/d(output) for one sample.
double sample_loss(std::span<const double> out, const Dataset& data,
                   std::size_t row, Loss loss, std::vector<double>* grad) {
  const std::size_t n = out.size();
  if (grad) grad->assign(n, 0.0);
  if (loss == Loss::SquaredError) {
    const auto y = data.y(row);
    double acc = 0.0;
    for (std::size_t o = 0; o < n; ++o) {
      const double d = out[o] - y[o];
      acc += d * d;
      if (grad) (*grad)[o] = 2.0 * d / n;
    }
    return acc / n;
  }
  const int label = data.labels.at(row);
  const double peak = *std::max_element(out.begin(), out.end());
  double z = 0.0;
  for (double v : out) z += std::exp(v - peak);
  if (grad) {
    for (std::size_t o = 0; o < n; ++o)
      (*grad)[o] = std::exp(out[o] - peak) / z - (static_cast<int>(o) == label);
  }
  return std::log(z) + peak - out[label];
}

void check_shapes(const KanNetwork& net, const Dataset& data, Loss loss) {
  net.validate();
  data.validate();
  if (data.n_features != net.n_in())
    throw ArgumentError("dataset has " + std::to_string(data.n_features) +
                        " features, network expects " +
                        std::to_string(net.n_in()));
  if (data.n_outputs != net.n_out())
    throw ArgumentError("dataset has " + std::to_string(data.n_outputs) +
                        " outputs, network produces " +
                        std::to_string(net.n_out()));
  if (loss == Loss::CrossEntropy && !data.is_classification())
    throw ArgumentError("cross-entropy loss needs a labelled dataset");
}

}  // namespace

double evaluate_loss(const KanNetwork& net, const Dataset& data, Loss loss) {
  if (data.size() == 0) return 0.0;
  check_shapes(net, data, loss);
  double acc = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto out = network_forward(net, data.x(i));
    acc += sample_loss(out, data, i, loss, nullptr);
  }
  return acc / data.size();
}

double accuracy(const KanNetwork& net, const Dataset& data) {
  if (!data.is_classification())
    throw ArgumentError("accuracy: dataset is not labelled");
  if (data.size() == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto out = network_forward(net, data.x(i));
    const auto best = std::max_element(out.begin(), out.end()) - out.begin();
    hits += best == data.labels[i];
  }
  return static_cast<double>(hits) / data.size();
}

std::vector<LayerGradients> network_gradients(const KanNetwork& net,
                                              const Dataset& data,
                                              std::span<const std::size_t> rows,
                                              Loss loss) {
  std::vector<LayerGradients> grads;
  for (const auto& l : net.layers)
    grads.push_back({std::vector<double>(l.coefficients().size(), 0.0),
                     std::vector<double>(l.residual_weights().size(), 0.0),
                     std::vector<double>(l.n_in(), 0.0)});
  if (rows.empty()) return grads;
  const double inv = 1.0 / rows.size();

  std::vector<double> upstream;
  for (const std::size_t row : rows) {
    const auto tr = traced_forward(net, data.x(row));
    sample_loss(tr.output, data, row, loss, &upstream);
    for (auto& u : upstream) u *= inv;
    for (std::size_t t = net.layers.size(); t-- > 0;) {
      auto& g = grads[t];
      std::fill(g.x.begin(), g.x.end(), 0.0);
      accumulate_layer_gradients(net.layers[t], tr.inputs[t], upstream, g);
      upstream.assign(g.x.begin(), g.x.end());
      for (std::size_t i = 0; i < upstream.size(); ++i)
        upstream[i] *= tr.passes[t][i];
    }
  }
  return grads;
}

namespace {
constexpr double kDivergenceBound = 1e150;
}  // namespace

TrainResult train(const KanNetwork& net, const Dataset& train_set,
                  const Dataset& val_set, const TrainConfig& cfg) {
  cfg.validate();
  check_shapes(net, train_set, cfg.loss);
  if (train_set.size() == 0) throw ArgumentError("train: empty dataset");
  const bool has_val = val_set.size() > 0;
  if (has_val) check_shapes(net, val_set, cfg.loss);

  TrainResult res{net, 0.0, 0.0, {}, {}};
  auto losses = [&](const KanNetwork& n) {
    const double tl = evaluate_loss(n, train_set, cfg.loss);
    const double vl = has_val ? evaluate_loss(n, val_set, cfg.loss) : tl;
    if (!std::isfinite(tl) || !std::isfinite(vl))
      throw TrainingDivergedError("training diverged: non-finite loss");
    return std::pair{tl, vl};
  };
  std::tie(res.initial_train_loss, res.initial_val_loss) = losses(res.net);

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
      const std::size_t e = std::min(order.size(), b + cfg.batch_size);
      const std::span<const std::size_t> rows(order.data() + b, e - b);
      const auto grads = network_gradients(res.net, train_set, rows, cfg.loss);
      for (std::size_t t = 0; t < res.net.layers.size(); ++t) {
        auto c = res.net.layers[t].coefficients();
        auto w = res.net.layers[t].residual_weights();
        bool ok = true;
        for (std::size_t i = 0; i < c.size(); ++i) {
          c[i] -= cfg.learning_rate * grads[t].c[i];
          ok &= std::abs(c[i]) <= kDivergenceBound;
        }
        for (std::size_t i = 0; i < w.size(); ++i) {
          w[i] -= cfg.learning_rate * grads[t].w_b[i];
          ok &= std::abs(w[i]) <= kDivergenceBound;
        }
        // Past this bound the next forward pass overflows.
        if (!ok) throw TrainingDivergedError("training diverged: parameters left the finite range");
      }
    }
    const auto [tl, vl] = losses(res.net);
    res.train_loss.push_back(tl);
    res.val_loss.push_back(vl);
  }
  return res;
}

KanNetwork random_network(std::span<const int> widths, const SplineGrid& grid,
                          double scale, std::uint64_t seed) {
  if (widths.size() < 2)
    throw ArgumentError("random_network: need at least input and output width");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  KanNetwork net;
  for (std::size_t t = 0; t + 1 < widths.size(); ++t) {
    KanLayer layer(widths[t], widths[t + 1], grid);
    for (auto& v : layer.coefficients()) v = u(rng);
    for (auto& v : layer.residual_weights()) v = u(rng);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

}  // namespace kanedge
