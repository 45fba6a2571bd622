#pragma once

#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "kanedge/crossbar.hpp"
#include "kanedge/inputgen.hpp"
#include "kanedge/kan.hpp"
#include "kanedge/quantizer.hpp"

namespace kanedge {

// Area in um^2, energy in fJ per operation, latency in ns.
struct PrimitiveCost {
  double area = 0.0;
  double energy = 0.0;
  double latency = 0.0;
};

inline constexpr int kUnitCostsVersion = 1;

struct UnitCosts {
  std::string label;
  PrimitiveCost lut_bit;
  PrimitiveCost decoder_line;
  PrimitiveCost tg;
  PrimitiveCost buffer;
  PrimitiveCost dac_level;  // per level per bit of resolution
  PrimitiveCost delay_stage;
  PrimitiveCost xbar_cell;  // energy per active cell per MAC
  PrimitiveCost adc;        // energy and latency per conversion
  PrimitiveCost reg;
  double unit_pulse_ns = 1.0;  // W_p1
  int adc_share = 8;           // columns multiplexed onto one ADC

  // Synthetic 22nm-class values, not calibrated against any chip.
  static UnitCosts synthetic_default();
  void validate() const;
};

UnitCosts unit_costs_from_json(const nlohmann::json& j);
nlohmann::json unit_costs_to_json(const UnitCosts& c);
UnitCosts load_unit_costs(const std::filesystem::path& path);

// Totals in um^2, pJ and ns; every total is the sum of its breakdown.
struct CostItem {
  double area = 0.0;
  double energy = 0.0;
  double latency = 0.0;
};

struct CostReport {
  std::map<std::string, CostItem> breakdown;

  double area() const noexcept;
  double energy() const noexcept;
  double latency() const noexcept;
  void add(const std::string& cls, CostItem item);
  void merge(const CostReport& other);
};

nlohmann::json cost_report_to_json(const CostReport& r);

enum class LookupMode { Conventional, Asp };

// B(x) retrieval for `fanout` inputs of one layer. Asp requires LD = max_ld(G, n).
CostReport lookup_path_cost(LookupMode mode, int G, int K, int n_bits, int ld, int out_bits,
                            int fanout, const UnitCosts& costs);

// Stored LUT bits of the lookup path for a single input.
long long lookup_lut_bits(LookupMode mode, int G, int K, int n_bits, int ld, int out_bits);

// One word-line input generator. N = 0 leaves only the output buffer.
CostReport encoder_cost(EncoderScheme scheme, int half_bits, const UnitCosts& costs);

// Figure of merit 1 / (area * power * latency), power = energy / W_p1.
struct FomRow {
  EncoderScheme scheme = EncoderScheme::Hybrid;
  int half_bits = 0;
  double area = 0.0;     // um^2
  double power = 0.0;    // uW
  double latency = 0.0;  // ns
  double fom = 0.0;
};

std::vector<FomRow> fom_compare(std::span<const EncoderConfig> cfgs, const UnitCosts& costs);

// Quantization and array settings shared by accelerator estimates.
struct AcceleratorSpec {
  int n_bits = 8;
  int out_bits = 6;  // = 2N of the input generators
  EncoderScheme scheme = EncoderScheme::Hybrid;
  int array_rows = 128;
  int half_bits() const noexcept { return (out_bits + 1) / 2; }
};

// Whole-network estimate: lookup path per layer, one encoder per word line,
// n_in (G+K+1) n_out cells per layer, shared ADCs; layers run sequentially.
CostReport accelerator_cost(const KanNetwork& net, const AcceleratorSpec& spec, const UnitCosts& costs);

// Dense MLP on the same array and ADC model, one extra bias row per layer,
// pure-voltage encoders.
CostReport mlp_cost(std::span<const int> widths, const AcceleratorSpec& spec, const UnitCosts& costs);
std::size_t mlp_parameter_count(std::span<const int> widths);

// Accelerator cells n_in (G+K+1) n_out summed over layers.
std::size_t accelerator_cells(const KanNetwork& net);
std::size_t accelerator_cells(std::span<const int> widths, int G, int K);

// CSV bodies for the comparison figures.
std::string fig10_csv(std::span<const int> grids, int K, int n_bits, int out_bits, int fanout,
                      const UnitCosts& costs);
std::string fig11_csv(std::span<const FomRow> rows);
std::string fig13_csv(const std::vector<std::pair<std::string, CostReport>>& columns,
                      const std::vector<std::size_t>& params);

}  // namespace kanedge
