#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <vector>

#include "kanedge/crossbar.hpp"
#include "kanedge/dataset.hpp"
#include "kanedge/kan.hpp"
#include "kanedge/quantizer.hpp"

namespace kanedge {

// Calibration distribution of one input feature.
struct InputDistribution {
  enum class Kind { Uniform, Gaussian, Histogram };
  Kind kind = Kind::Uniform;
  double mu = 0.0;
  double sigma = 1.0;
  std::vector<double> code_weights;  // Histogram: mass per quantization code

  static InputDistribution uniform();
  static InputDistribution gaussian(double mu, double sigma);
  static InputDistribution histogram(std::vector<double> code_weights);
};

InputDistribution distribution_from_json(const nlohmann::json& j);
nlohmann::json distribution_to_json(const InputDistribution& d);

// Mass of each knot interval; out-of-domain mass is clamped onto the end
// intervals. Histograms are read through the code -> interval map of the grid.
std::vector<double> interval_probability(const SplineGrid& grid, const InputDistribution& dist);

// p[i] = P(interval in [i-K, i] ∩ [0, G-1]).
std::vector<double> activation_probability(const SplineGrid& grid, const InputDistribution& dist);

// P(x > 0) after clamping, the residual row's activation probability.
double residual_probability(const SplineGrid& grid, const InputDistribution& dist);

// Stable descending sort of row indices by p.
std::vector<int> sam_order(std::span<const double> p);

// Row ordering for one feature block of G+K+1 rows: bases 0..G+K-1, then the
// residual row at index G+K. order[k] is the block row placed k-th from the clamp.
struct MappingPlan {
  std::vector<double> p;  // bases then residual
  std::vector<int> order;
};

MappingPlan plan_feature_block(const SplineGrid& grid, const InputDistribution& dist);
nlohmann::json plan_to_json(const MappingPlan& plan);

enum class RowOrdering { Identity, Sam, SamInterleaved };

// Tiling of one layer: each feature owns a contiguous block of G+K+1 rows and
// blocks never straddle arrays. Unused rows of a tile stay at the far end.
struct TileLayout {
  int block_rows = 0;
  int features_per_tile = 0;
  int tiles = 0;
};

TileLayout tile_layout(int n_in, const SplineGrid& grid, int array_rows);

// Per layer, per tile: physical position -> local row of that tile.
using RowOrders = std::vector<std::vector<std::vector<int>>>;

// plans[t] is used for layer t. SamInterleaved sorts all used rows of a tile
// by p instead of keeping feature blocks contiguous.
RowOrders make_row_orders(const KanNetwork& net, int array_rows, RowOrdering ordering,
                          std::span<const MappingPlan> plans);

// Activation plans for every layer: layer 0 from `first`, later layers from
// the code histogram observed when `calibration` is run through the float net
// (uniform when no calibration rows are given).
std::vector<MappingPlan> plan_network(const KanNetwork& net, int n_bits, int out_bits,
                                      const InputDistribution& first,
                                      const Dataset* calibration = nullptr);

struct AnalogConfig {
  int n_bits = 8;
  int out_bits = 8;
  CrossbarConfig xbar;   // rows = array size; cols and max_input are derived per layer
  bool stochastic = false;  // apply the crossbar error table
  std::uint64_t seed = 0;
};

// One KAN layer programmed onto crossbar tiles with a joint 8-bit scale for
// spline coefficients and residual weights.
class AnalogLayer {
 public:
  AnalogLayer(const KanLayer& layer, const AnalogConfig& cfg, std::span<const std::vector<int>> orders);
  // Tile models point into tiles_, so copies are disabled; moves keep the buffer.
  AnalogLayer(const AnalogLayer&) = delete;
  AnalogLayer& operator=(const AnalogLayer&) = delete;
  AnalogLayer(AnalogLayer&&) = default;
  AnalogLayer& operator=(AnalogLayer&&) = default;

  std::vector<double> forward(std::span<const double> x, std::mt19937_64* rng) const;

  const TileLayout& layout() const noexcept { return layout_; }
  const HaqConfig& haq() const noexcept { return haq_; }
  const ShLut& lut() const noexcept { return lut_; }
  double scale() const noexcept { return scale_; }
  const std::vector<ProgrammedArray>& tiles() const noexcept { return tiles_; }

 private:
  SplineGrid grid_;
  int n_in_, n_out_;
  HaqConfig haq_;
  ShLut lut_;
  TileLayout layout_;
  CrossbarConfig tile_cfg_;
  bool stochastic_;
  double scale_ = 1.0;   // real weight = int8 * scale
  double relu_range_ = 0.0;
  std::vector<ProgrammedArray> tiles_;
  std::vector<IrDropModel> models_;
};

class AnalogNetwork {
 public:
  AnalogNetwork(const KanNetwork& net, const AnalogConfig& cfg, const RowOrders& orders);

  // Noise stream for sample i is seeded from (seed, i) so results do not
  // depend on evaluation order.
  std::vector<double> forward(std::span<const double> x, std::size_t sample) const;
  const std::vector<AnalogLayer>& layers() const noexcept { return layers_; }

 private:
  std::vector<AnalogLayer> layers_;
  AnalogConfig cfg_;
};

// Classification accuracy of the quantized analog pipeline.
double evaluate_mapping(const KanNetwork& net, const AnalogConfig& cfg, const Dataset& data,
                        const RowOrders& orders);

std::uint64_t sample_seed(std::uint64_t seed, std::size_t sample) noexcept;

}  // namespace kanedge
