#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace kanedge {

// Partial-sum error statistics for one array size. sigma is a fraction of the
// column's ADC full scale.
struct ErrorStat {
  double gain = 1.0;
  double sigma = 0.0;
};

class ErrorTable {
 public:
  ErrorTable() = default;
  explicit ErrorTable(std::map<int, ErrorStat> entries);

  bool empty() const noexcept { return entries_.empty(); }
  const std::map<int, ErrorStat>& entries() const noexcept { return entries_; }

  // Exact entry, or linear interpolation between the bracketing sizes.
  // ConfigError when rows falls outside the table.
  ErrorStat at(int rows) const;

  // Synthetic statistics, sigma growing with array size. Not measured data.
  static ErrorTable synthetic_default();

 private:
  std::map<int, ErrorStat> entries_;
};

ErrorTable error_table_from_json(const nlohmann::json& j);
nlohmann::json error_table_to_json(const ErrorTable& t);
ErrorTable load_error_table(const std::filesystem::path& path);

struct CrossbarConfig {
  int rows = 128;
  int cols = 1;
  double g_unit = 1.0;    // uS per weight LSB
  double r_wire = 0.0;    // ohm per bit-line segment
  double v_read = 0.2;    // V per input level
  int adc_bits = 8;
  std::uint32_t max_input = 255;  // input level range [0, max_input]
  std::optional<ErrorTable> error_table;
  std::uint64_t seed = 0;

  // Segment resistance in units of 1/g_unit.
  double rho() const noexcept { return r_wire * g_unit * 1e-6; }
  // Ideal MAC unit to analog current (uA).
  double current_scale() const noexcept { return v_read * g_unit; }

  void validate() const;
};

CrossbarConfig crossbar_config_from_json(const nlohmann::json& j);
nlohmann::json crossbar_config_to_json(const CrossbarConfig& c);

// Immutable programmed array. Logical row r sits at physical position
// position_of(r); position 0 is adjacent to the bit-line clamp.
class ProgrammedArray {
 public:
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int weight(int row, int col) const { return weights_[static_cast<std::size_t>(row) * cols_ + col]; }
  const std::vector<int>& weights() const noexcept { return weights_; }
  const std::vector<int>& row_order() const noexcept { return order_; }
  int position_of(int row) const { return position_[row]; }

  // Unsigned cell values of the differential pair at a physical position.
  int positive_cell(int position, int col) const;
  int negative_cell(int position, int col) const;
  double conductance(int position, int col, bool negative, const CrossbarConfig& cfg) const;

  // Ideal maximum |MAC| of a column, used for the ADC full scale.
  double full_scale(int col, std::uint32_t max_input) const;

 private:
  friend ProgrammedArray program(std::span<const int>, std::span<const int>,
                                 const CrossbarConfig&);
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> weights_;   // logical rows × cols
  std::vector<int> order_;     // position -> logical row
  std::vector<int> position_;  // logical row -> position
  std::vector<double> col_pos_sum_, col_neg_sum_;
};

// weights: rows × cols row-major signed values in [-127, 127].
// row_order[p] is the logical row placed at physical position p.
ProgrammedArray program(std::span<const int> weights, std::span<const int> row_order,
                        const CrossbarConfig& cfg);
std::vector<int> identity_order(int rows);

struct MacResult {
  std::vector<long long> ideal;
  std::vector<double> analog;  // uA
  std::vector<int> adc_code;
};

std::vector<long long> ideal_mac(const ProgrammedArray& a, std::span<const std::uint32_t> inputs);

// Signed ADC: analog is scaled by the column full scale onto
// [-(2^(b-1)-1), 2^(b-1)-1] with round-to-nearest.
int adc_quantize(double analog, double full_scale_current, int adc_bits) noexcept;

// Direct per-column tridiagonal ladder solve.
MacResult ir_drop_mac(const ProgrammedArray& a, std::span<const std::uint32_t> inputs,
                      const CrossbarConfig& cfg);

// Clamp current of one bit line. cell[p] is the conductance in g_unit units and
// drive[p] the source level at position p; node 0 is held at the clamp.
double ladder_current(std::span<const double> cell, std::span<const double> drive, double rho);

// Node voltages (drive units) of the same ladder; v[0] = 0.
std::vector<double> ladder_voltages(std::span<const double> cell, std::span<const double> drive,
                                    double rho);

// The ladder is linear in the drives, so each column reduces to one transfer
// weight per position. Precomputed once per array; agrees with ir_drop_mac.
class IrDropModel {
 public:
  IrDropModel(const ProgrammedArray& a, const CrossbarConfig& cfg);

  MacResult mac(std::span<const std::uint32_t> inputs) const;
  MacResult stochastic_mac(std::span<const std::uint32_t> inputs, std::mt19937_64& rng) const;

  const ProgrammedArray& array() const noexcept { return *array_; }

 private:
  const ProgrammedArray* array_;
  CrossbarConfig cfg_;
  std::optional<ErrorStat> stat_;
  std::vector<double> alpha_;  // cols × rows, by physical position (pos minus neg)
  std::vector<double> full_scale_;
};

// analog = gain·ir_drop + Normal(0, sigma·full_scale) per column.
MacResult stochastic_mac(const ProgrammedArray& a, std::span<const std::uint32_t> inputs,
                         const CrossbarConfig& cfg, std::mt19937_64& rng);

// Debug dump: header "row,position,w0..w{cols-1}", one line per logical row.
std::string array_csv(const ProgrammedArray& a);
ProgrammedArray array_from_csv(const std::string& text, const CrossbarConfig& cfg);

}  // namespace kanedge
