#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "kanedge/cost_model.hpp"
#include "kanedge/dataset.hpp"
#include "kanedge/inputgen.hpp"
#include "kanedge/mapper.hpp"
#include "kanedge/train.hpp"

namespace kanedge {

// Seed streams derived from one top-level seed S:
//   network init S + 1000, training shuffle S + 1001, noise repeat i S + i.
inline constexpr std::uint64_t kInitSeedOffset = 1000;
inline constexpr std::uint64_t kShuffleSeedOffset = 1001;

struct ArrayPoint {
  int array_rows = 128;
  int G = 7;
};

struct MapCompareConfig {
  std::vector<ArrayPoint> points = {{128, 7}, {256, 15}, {512, 30}, {1024, 60}};
  int K = 3;
  std::vector<int> hidden;  // widths between input and output layers
  int repeats = 20;
  std::uint64_t seed = 0;
  RowOrdering sam = RowOrdering::SamInterleaved;
  double calib_mu = 0.0;
  double calib_sigma = 0.35;
  AnalogConfig analog;  // xbar.rows is set per point
  TrainConfig train;
  double init_scale = 0.1;

  MapCompareConfig();
  void validate() const;
};

MapCompareConfig map_compare_config_from_json(const nlohmann::json& j);
nlohmann::json map_compare_config_to_json(const MapCompareConfig& c);

struct MapCompareRow {
  int array_rows = 0;
  int G = 0;
  int rows_per_feature = 0;
  std::uint64_t seed = 0;
  double float_acc = 0.0;
  double ideal_acc = 0.0;  // r_wire = 0, no noise, identity order
  double baseline_acc = 0.0;
  double sam_acc = 0.0;
  double benefit() const noexcept { return sam_acc - baseline_acc; }
};

// One trained network per point, then `repeats` paired baseline/SAM runs
// sharing the noise seed.
std::vector<MapCompareRow> map_compare(const Dataset& train_set, const Dataset& test_set,
                                       const MapCompareConfig& cfg);
std::string map_compare_csv(const std::vector<MapCompareRow>& rows);

struct SigmaPair {
  double current = 0.0;
  double width = 0.0;
};

struct InputgenSweepConfig {
  std::vector<EncoderScheme> schemes = {EncoderScheme::PureVoltage, EncoderScheme::PurePWM,
                                        EncoderScheme::Hybrid};
  std::vector<int> half_bits = {1, 2, 3, 4};
  std::vector<SigmaPair> sigmas = {{0.0, 0.0}, {0.01, 0.01}, {0.02, 0.02}, {0.05, 0.05}};
  std::size_t trials = 10000;
  double unit_width = 1.0;
  double unit_current = 1.0;
  std::uint64_t seed = 0;  // shared by every point, so sweeps use common random numbers

  void validate() const;
};

InputgenSweepConfig inputgen_sweep_config_from_json(const nlohmann::json& j);

struct InputgenSweepRow {
  EncoderScheme scheme = EncoderScheme::Hybrid;
  int half_bits = 0;
  SigmaPair sigma;
  YieldResult yield;
  FomRow cost;
};

std::vector<InputgenSweepRow> sweep_inputgen(const InputgenSweepConfig& cfg, const UnitCosts& costs);
std::string sweep_inputgen_csv(const std::vector<InputgenSweepRow>& rows);

// MLP widths holding the 190,214-parameter reference baseline.
std::vector<int> reference_mlp_widths();

struct CostComparison {
  CostReport kan;
  CostReport mlp;
  std::size_t kan_params = 0;
  std::size_t mlp_params = 0;
};

CostComparison compare_with_mlp(const KanNetwork& net, std::span<const int> mlp_widths,
                                const AcceleratorSpec& spec, const UnitCosts& costs);

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});
nlohmann::json train_config_to_json(const TrainConfig& c);
AnalogConfig analog_config_from_json(const nlohmann::json& j, AnalogConfig base = {});

// Throws ConfigError when the model's grid disagrees with the HAQ config.
void cross_validate(const KanNetwork& net, const HaqConfig& haq);
HaqConfig haq_config_from_json(const nlohmann::json& j);
nlohmann::json haq_config_to_json(const HaqConfig& h);

}  // namespace kanedge
