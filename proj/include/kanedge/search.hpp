#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kanedge/cost_model.hpp"
#include "kanedge/dataset.hpp"
#include "kanedge/kan.hpp"
#include "kanedge/train.hpp"

namespace kanedge {

// Upper bounds; an empty optional leaves that metric unbounded.
struct Constraints {
  std::optional<double> area_max_mm2;
  std::optional<double> energy_max_pj;
  std::optional<double> latency_max_ns;

  void validate() const;
  // Empty string when the report fits, else the first violated bound.
  std::string violation(const CostReport& r) const;
};

Constraints constraints_from_json(const nlohmann::json& j);
nlohmann::json constraints_to_json(const Constraints& c);

// TD-P drives N = 4 input generators, TD-A N = 2 (tool defaults).
enum class EncoderMode { TdP, TdA };
int half_bits_for(EncoderMode mode) noexcept;

struct SearchConfig {
  std::vector<std::vector<int>> candidates;  // layer-width chains, tried in order
  int K = 3;
  int G_init = 5;
  int E = 5;
  int N_epochs = 10;
  int max_G = 30;
  EncoderMode mode = EncoderMode::TdP;
  std::uint64_t seed = 0;
  int n_bits = 8;
  int array_rows = 128;
  double x_min = -1.0, x_max = 1.0;
  double init_scale = 0.1;
  double validation_fraction = 0.2;
  double rel_tolerance = 1e-4;
  TrainConfig train;  // epochs is ignored; N_epochs applies per segment

  void validate() const;
  AcceleratorSpec accelerator() const;
};

SearchConfig search_config_from_json(const nlohmann::json& j);

struct FeasibilityResult {
  bool ok = false;
  CostReport cost;
  std::string violation;
};

// Cost of `arch` on a (G, K) grid against the bounds. Throws InfeasibleError
// when no LD satisfies G * 2^LD <= 2^n, which is distinct from ok = false.
FeasibilityResult feasible(std::span<const int> arch, int K, int G, const Constraints& constraints,
                           const UnitCosts& costs, const AcceleratorSpec& spec);

enum class Decision { Extend, RevertStop, ConstraintStop };
std::string_view to_string(Decision d) noexcept;

struct SearchStep {
  int G = 0;
  int epochs = 0;
  double val_loss = 0.0;       // last epoch of the segment
  double best_val_loss = 0.0;  // best epoch of the segment
  CostReport cost;
  Decision decision = Decision::ConstraintStop;
  std::string reason;
  std::string weights_hash;  // network at the end of the segment
};

struct SearchOutcome {
  KanNetwork net;
  std::vector<int> arch;
  int final_G = 0;
  double initial_val_loss = 0.0;
  double final_val_loss = 0.0;
  CostReport final_cost;
  std::vector<SearchStep> trace;
  std::string weights_hash;
};

// Step 1 picks the first candidate feasible at G_init (NoFeasibleStartError if
// none). Step 2 trains N_epochs per segment; segment s uses seed + s. At each
// boundary the grid grows by E while the best validation loss keeps falling
// by more than rel_tolerance and G + E stays feasible and <= max_G.
SearchOutcome optimize(const Dataset& data, const Constraints& constraints, const SearchConfig& cfg,
                       const UnitCosts& costs);

nlohmann::json outcome_to_json(const SearchOutcome& o);
std::string trace_csv(const SearchOutcome& o);

std::string network_hash(const KanNetwork& net);

}  // namespace kanedge
