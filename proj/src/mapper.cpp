#include "kanedge/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kanedge/error.hpp"
#include "kanedge/parallel.hpp"

namespace kanedge {

InputDistribution InputDistribution::uniform() { return {}; }

InputDistribution InputDistribution::gaussian(double mu, double sigma) {
  InputDistribution d;
  d.kind = Kind::Gaussian;
  d.mu = mu;
  d.sigma = sigma;
  return d;
}

InputDistribution InputDistribution::histogram(std::vector<double> code_weights) {
  InputDistribution d;
  d.kind = Kind::Histogram;
  d.code_weights = std::move(code_weights);
  return d;
}

InputDistribution distribution_from_json(const nlohmann::json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "uniform") return InputDistribution::uniform();
    if (kind == "gaussian")
      return InputDistribution::gaussian(j.value("mu", 0.0), j.at("sigma").get<double>());
    if (kind == "histogram")
      return InputDistribution::histogram(j.at("code_weights").get<std::vector<double>>());
    throw ConfigError("calibration distribution: unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("calibration distribution: ") + e.what());
  }
}

nlohmann::json distribution_to_json(const InputDistribution& d) {
  switch (d.kind) {
    case InputDistribution::Kind::Uniform: return {{"kind", "uniform"}};
    case InputDistribution::Kind::Gaussian:
      return {{"kind", "gaussian"}, {"mu", d.mu}, {"sigma", d.sigma}};
    case InputDistribution::Kind::Histogram:
      return {{"kind", "histogram"}, {"code_weights", d.code_weights}};
  }
  return {};
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::vector<double> normalized(std::vector<double> mass) {
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total))
    throw ArgumentError("calibration distribution has no mass in the domain");
  for (double& m : mass) m /= total;
  return mass;
}

}  // namespace

std::vector<double> interval_probability(const SplineGrid& grid, const InputDistribution& dist) {
  grid.validate();
  const int g = grid.intervals;
  std::vector<double> mass(g, 0.0);
  switch (dist.kind) {
    case InputDistribution::Kind::Uniform:
      std::fill(mass.begin(), mass.end(), 1.0);
      break;
    case InputDistribution::Kind::Gaussian: {
      if (!(dist.sigma > 0.0) || !std::isfinite(dist.mu))
        throw ArgumentError("gaussian calibration needs sigma > 0 and finite mu");
      double prev = 0.0;  // CDF at -inf: end mass folds into interval 0
      for (int i = 0; i < g; ++i) {
        const double hi = i + 1 < g ? normal_cdf((grid.x_min + (i + 1) * grid.step() - dist.mu) / dist.sigma)
                                    : 1.0;
        mass[i] = hi - prev;
        prev = hi;
      }
      break;
    }
    case InputDistribution::Kind::Histogram: {
      const auto codes = dist.code_weights.size();
      if (codes == 0 || codes % g != 0)
        throw ArgumentError("histogram length " + std::to_string(codes) +
                            " is not a multiple of the interval count");
      const std::size_t per = codes / g;
      for (std::size_t c = 0; c < codes; ++c) {
        if (dist.code_weights[c] < 0.0) throw ArgumentError("histogram weights must be >= 0");
        mass[c / per] += dist.code_weights[c];
      }
      break;
    }
  }
  return normalized(std::move(mass));
}

std::vector<double> activation_probability(const SplineGrid& grid, const InputDistribution& dist) {
  const auto q = interval_probability(grid, dist);
  const int g = grid.intervals, k = grid.degree;
  std::vector<double> p(grid.basis_count(), 0.0);
  for (int i = 0; i < grid.basis_count(); ++i)
    for (int j = std::max(0, i - k); j <= std::min(i, g - 1); ++j) p[i] += q[j];
  return p;
}

double residual_probability(const SplineGrid& grid, const InputDistribution& dist) {
  if (grid.x_max <= 0.0) return 0.0;
  switch (dist.kind) {
    case InputDistribution::Kind::Uniform:
      return grid.x_min >= 0.0 ? 1.0 : grid.x_max / (grid.x_max - grid.x_min);
    case InputDistribution::Kind::Gaussian:
      if (grid.x_min >= 0.0) return 1.0;
      return 1.0 - normal_cdf((0.0 - dist.mu) / dist.sigma);
    case InputDistribution::Kind::Histogram: {
      const auto codes = dist.code_weights.size();
      const auto q = normalized(dist.code_weights);
      const double h = (grid.x_max - grid.x_min) / codes;
      double p = 0.0;
      for (std::size_t c = 0; c < codes; ++c)
        if (grid.x_min + (c + 0.5) * h > 0.0) p += q[c];
      return p;
    }
  }
  return 0.0;
}

std::vector<int> sam_order(std::span<const double> p) {
  std::vector<int> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p[a] > p[b]; });
  return order;
}

MappingPlan plan_feature_block(const SplineGrid& grid, const InputDistribution& dist) {
  MappingPlan plan;
  plan.p = activation_probability(grid, dist);
  plan.p.push_back(residual_probability(grid, dist));
  plan.order = sam_order(plan.p);
  return plan;
}

nlohmann::json plan_to_json(const MappingPlan& plan) {
  return {{"p", plan.p}, {"order", plan.order}, {"residual_row", plan.p.size() - 1}};
}

TileLayout tile_layout(int n_in, const SplineGrid& grid, int array_rows) {
  TileLayout t;
  t.block_rows = grid.basis_count() + 1;
  t.features_per_tile = array_rows / t.block_rows;
  if (t.features_per_tile < 1)
    throw ConfigError("array of " + std::to_string(array_rows) + " rows cannot hold one feature block of " +
                      std::to_string(t.block_rows) + " rows");
  t.tiles = (n_in + t.features_per_tile - 1) / t.features_per_tile;
  return t;
}

RowOrders make_row_orders(const KanNetwork& net, int array_rows, RowOrdering ordering,
                          std::span<const MappingPlan> plans) {
  if (ordering != RowOrdering::Identity && plans.size() != net.layers.size())
    throw ArgumentError("make_row_orders: one mapping plan per layer required");
  RowOrders all;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const auto& layer = net.layers[li];
    const auto lay = tile_layout(layer.n_in(), layer.grid(), array_rows);
    std::vector<std::vector<int>> tiles;
    for (int t = 0; t < lay.tiles; ++t) {
      const int features = std::min(lay.features_per_tile, layer.n_in() - t * lay.features_per_tile);
      const int used = features * lay.block_rows;
      std::vector<int> order(array_rows);
      std::iota(order.begin(), order.end(), 0);
      if (ordering == RowOrdering::Sam) {
        const auto& plan = plans[li];
        if (plan.order.size() != static_cast<std::size_t>(lay.block_rows))
          throw ArgumentError("mapping plan size differs from the layer's feature block");
        for (int f = 0; f < features; ++f)
          for (int k = 0; k < lay.block_rows; ++k)
            order[f * lay.block_rows + k] = f * lay.block_rows + plan.order[k];
      } else if (ordering == RowOrdering::SamInterleaved) {
        const auto& plan = plans[li];
        if (plan.p.size() != static_cast<std::size_t>(lay.block_rows))
          throw ArgumentError("mapping plan size differs from the layer's feature block");
        std::vector<double> p(used);
        for (int r = 0; r < used; ++r) p[r] = plan.p[r % lay.block_rows];
        const auto sorted = sam_order(p);
        std::copy(sorted.begin(), sorted.end(), order.begin());
      }
      tiles.push_back(std::move(order));
    }
    all.push_back(std::move(tiles));
  }
  return all;
}

std::vector<MappingPlan> plan_network(const KanNetwork& net, int n_bits, int out_bits,
                                      const InputDistribution& first, const Dataset* calibration) {
  net.validate();
  std::vector<MappingPlan> plans;
  plans.push_back(plan_feature_block(net.layers[0].grid(), first));
  for (std::size_t li = 1; li < net.layers.size(); ++li) {
    const auto& grid = net.layers[li].grid();
    if (!calibration || calibration->size() == 0) {
      plans.push_back(plan_feature_block(grid, InputDistribution::uniform()));
      continue;
    }
    const auto haq = HaqConfig::for_grid(grid, n_bits, out_bits);
    std::vector<double> hist(haq.code_count(), 0.0);
    for (std::size_t s = 0; s < calibration->size(); ++s) {
      std::vector<double> x(calibration->x(s).begin(), calibration->x(s).end());
      for (std::size_t t = 0; t < li; ++t) {
        for (auto& v : x) v = net.layers[t].grid().clamp(v);
        x = layer_forward(net.layers[t], x);
      }
      for (double v : x) hist[quantize_input(grid.clamp(v), grid, haq)] += 1.0;
    }
    plans.push_back(plan_feature_block(grid, InputDistribution::histogram(std::move(hist))));
  }
  return plans;
}

std::uint64_t sample_seed(std::uint64_t seed, std::size_t sample) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (sample + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

AnalogLayer::AnalogLayer(const KanLayer& layer, const AnalogConfig& cfg,
                         std::span<const std::vector<int>> orders)
    : grid_(layer.grid()),
      n_in_(layer.n_in()),
      n_out_(layer.n_out()),
      haq_(HaqConfig::for_grid(layer.grid(), cfg.n_bits, cfg.out_bits)),
      lut_(haq_.degree, haq_.ld, haq_.out_bits),
      layout_(tile_layout(layer.n_in(), layer.grid(), cfg.xbar.rows)),
      tile_cfg_(cfg.xbar),
      stochastic_(cfg.stochastic) {
  tile_cfg_.cols = n_out_;
  tile_cfg_.max_input = haq_.max_level();
  if (orders.size() != static_cast<std::size_t>(layout_.tiles))
    throw ArgumentError("analog layer: expected " + std::to_string(layout_.tiles) + " tile orders");
  relu_range_ = std::max(grid_.x_max, 0.0);
  double peak = 0.0;
  for (double c : layer.coefficients()) peak = std::max(peak, std::abs(c));
  for (double w : layer.residual_weights()) peak = std::max(peak, std::abs(w) * relu_range_);
  scale_ = peak > 0.0 ? peak / 127.0 : 1.0;
  auto q = [&](double v) { return static_cast<int>(std::clamp(std::nearbyint(v / scale_), -127.0, 127.0)); };

  const int nb = grid_.basis_count();
  const int rows = tile_cfg_.rows;
  for (int t = 0; t < layout_.tiles; ++t) {
    std::vector<int> w(static_cast<std::size_t>(rows) * n_out_, 0);
    for (int f = 0; f < layout_.features_per_tile; ++f) {
      const int in = t * layout_.features_per_tile + f;
      if (in >= n_in_) break;
      for (int o = 0; o < n_out_; ++o) {
        for (int b = 0; b < nb; ++b)
          w[static_cast<std::size_t>(f * layout_.block_rows + b) * n_out_ + o] = q(layer.c(in, o, b));
        w[static_cast<std::size_t>(f * layout_.block_rows + nb) * n_out_ + o] =
            q(layer.w_b(in, o) * relu_range_);
      }
    }
    tiles_.push_back(program(w, orders[t], tile_cfg_));
  }
  for (const auto& a : tiles_) models_.emplace_back(a, tile_cfg_);
}

std::vector<double> AnalogLayer::forward(std::span<const double> x, std::mt19937_64* rng) const {
  if (x.size() != static_cast<std::size_t>(n_in_)) throw ArgumentError("analog layer: input size mismatch");
  const int rows = tile_cfg_.rows;
  const double lmax = haq_.max_level();
  const double h_q = (grid_.x_max - grid_.x_min) / haq_.code_count();
  const double steps = static_cast<double>((1 << (tile_cfg_.adc_bits - 1)) - 1);
  std::vector<double> y(n_out_, 0.0);
  std::vector<std::uint32_t> in(rows);
  for (int t = 0; t < layout_.tiles; ++t) {
    std::fill(in.begin(), in.end(), 0u);
    for (int f = 0; f < layout_.features_per_tile; ++f) {
      const int i = t * layout_.features_per_tile + f;
      if (i >= n_in_) break;
      const auto code = quantize_input(grid_.clamp(x[i]), grid_, haq_);
      const auto access = retrieve_b_values(code, lut_, haq_);
      const int base = f * layout_.block_rows;
      for (int m = 0; m <= grid_.degree; ++m) in[base + access.global + m] = access.levels[m];
      if (relu_range_ > 0.0) {
        const double relu = relu_level(code, grid_, haq_) * h_q / 2.0;
        in[base + grid_.basis_count()] =
            static_cast<std::uint32_t>(std::clamp(std::nearbyint(relu / relu_range_ * lmax), 0.0, lmax));
      }
    }
    const auto res = stochastic_ ? models_[t].stochastic_mac(in, *rng) : models_[t].mac(in);
    for (int o = 0; o < n_out_; ++o) {
      const double fs = tiles_[t].full_scale(o, tile_cfg_.max_input);
      y[o] += res.adc_code[o] / steps * fs * scale_ / lmax;
    }
  }
  return y;
}

AnalogNetwork::AnalogNetwork(const KanNetwork& net, const AnalogConfig& cfg, const RowOrders& orders)
    : cfg_(cfg) {
  net.validate();
  cfg.xbar.validate();
  if (orders.size() != net.layers.size()) throw ArgumentError("analog network: one order set per layer");
  if (cfg.stochastic && !cfg.xbar.error_table)
    throw ConfigError("stochastic evaluation needs an error table; supply measured or synthetic statistics");
  for (std::size_t li = 0; li < net.layers.size(); ++li)
    layers_.emplace_back(net.layers[li], cfg, orders[li]);
}

std::vector<double> AnalogNetwork::forward(std::span<const double> x, std::size_t sample) const {
  std::mt19937_64 rng(sample_seed(cfg_.seed, sample));
  std::vector<double> v(x.begin(), x.end());
  for (const auto& layer : layers_) v = layer.forward(v, &rng);
  return v;
}

double evaluate_mapping(const KanNetwork& net, const AnalogConfig& cfg, const Dataset& data,
                        const RowOrders& orders) {
  if (!data.is_classification()) throw ArgumentError("evaluate_mapping: dataset must be labeled");
  if (data.n_features != net.n_in()) throw ArgumentError("evaluate_mapping: feature count mismatch");
  if (data.size() == 0) throw ArgumentError("evaluate_mapping: empty dataset");
  const AnalogNetwork analog(net, cfg, orders);
  std::vector<unsigned char> hit(data.size(), 0);
  parallel_for(data.size(), [&](std::size_t s) {
    const auto y = analog.forward(data.x(s), s);
    const auto best = std::max_element(y.begin(), y.end()) - y.begin();
    hit[s] = best == data.labels[s];
  });
  const auto good = std::count(hit.begin(), hit.end(), 1);
  return static_cast<double>(good) / data.size();
}

}  // namespace kanedge
