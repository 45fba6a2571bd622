#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "kanedge/kan.hpp"
#include "kanedge/spline.hpp"

namespace kanedge {

// Largest LD >= 0 with G * 2^LD <= 2^n. Throws InfeasibleError if G > 2^n.
int max_ld(int intervals, int n_bits);

// G * L <= 2^n: the quantization grid subdivides every knot interval into L
// equal cells without a remainder.
bool check_alignment(int intervals, long long cells_per_interval, int n_bits);
bool is_power_of_two(long long v) noexcept;

// Hardware-aware quantization contract for one spline grid.
struct HaqConfig {
  int n_bits = 8;       // input code width
  int ld = 0;           // log2 of cells per knot interval
  int intervals = 5;    // G
  int degree = 3;       // K
  int out_bits = 6;     // LUT level width, 2N of the input generator
  bool is_signed = false;

  // LD chosen by max_ld for the grid.
  static HaqConfig for_grid(const SplineGrid& grid, int n_bits = 8,
                            int out_bits = 6, bool is_signed = false);

  long long cells_per_interval() const noexcept { return 1LL << ld; }
  long long code_count() const noexcept { return intervals * cells_per_interval(); }
  std::uint32_t max_level() const noexcept { return (1u << out_bits) - 1u; }

  // Throws ConfigError if LD violates G * 2^LD <= 2^n or fields are invalid.
  void validate() const;
  // Throws ConfigError if (G, K) disagree with the grid.
  void check_grid(const SplineGrid& grid) const;
};

// Input code for x: floor((x - x_min) / h_q) clamped to the code range,
// where h_q = (x_max - x_min) / (G * 2^LD). Knot boundaries map exactly to
// multiples of 2^LD.
std::uint32_t quantize_input(double x, const SplineGrid& grid, const HaqConfig& cfg);

// Centre of the cell addressed by `code`.
double code_midpoint(std::uint32_t code, const SplineGrid& grid, const HaqConfig& cfg);

struct CodeSplit {
  std::uint32_t global = 0;  // knot interval g
  std::uint32_t local = 0;   // cell l inside the interval
};

CodeSplit split_index(std::uint32_t code, int ld) noexcept;

// Sharable-Hemi LUT: quantized cardinal pieces sampled at cell midpoints,
// storing only ceil((K+1)/2) pieces and mirroring the rest.
class ShLut {
 public:
  ShLut(int degree, int ld, int out_bits);

  int degree() const noexcept { return degree_; }
  int ld() const noexcept { return ld_; }
  int out_bits() const noexcept { return out_bits_; }
  int stored_pieces() const noexcept { return stored_; }
  std::size_t cells() const noexcept { return std::size_t{1} << ld_; }
  std::size_t stored_entries() const noexcept { return entries_.size(); }
  std::uint64_t id() const noexcept { return id_; }

  // Raw stored entry, m < stored_pieces().
  std::uint32_t entry(int m, std::uint32_t l) const;
  // Level of basis offset m in [0, K] at local cell l.
  std::uint32_t lookup(int m, std::uint32_t l) const;

 private:
  int degree_;
  int ld_;
  int out_bits_;
  int stored_;
  std::uint64_t id_;
  std::vector<std::uint32_t> entries_;
};

ShLut build_sh_lut(int degree, int ld, int out_bits);

// Value the LUT stores for (m, l): round(C(K - m + t_mid) * (2^b - 1)).
std::uint32_t quantized_piece(int degree, int m, std::uint32_t l, int ld,
                              int out_bits);

// CSV dump "m,l,level" of the stored entries.
void save_lut_csv(const ShLut& lut, const std::filesystem::path& path);
std::string lut_csv(const ShLut& lut);

struct BAccess {
  std::uint32_t global = 0;
  std::uint32_t local = 0;
  std::vector<std::uint32_t> levels;  // levels[m] belongs to basis global + m
};

BAccess retrieve_b_values(std::uint32_t code, const ShLut& lut, const HaqConfig& cfg);

// Records which LUT instances a forward pass touched.
struct LookupTrace {
  std::set<std::uint64_t> lut_ids;
  std::size_t lookups = 0;
};

// Per-layer symmetric 8-bit weights.
struct QuantizedLayer {
  int n_in = 0;
  int n_out = 0;
  SplineGrid grid;
  std::vector<std::int8_t> c;    // n_in x n_out x (G+K)
  double c_scale = 1.0;          // real c = c8 * c_scale
  std::vector<std::int8_t> w_b;  // n_in x n_out
  double w_b_scale = 1.0;

  std::int8_t c_at(int in, int out, int basis) const {
    return c[(static_cast<std::size_t>(in) * n_out + out) * grid.basis_count() + basis];
  }
};

// Round-to-nearest-even onto [-127, 127] with scale max|v| / 127.
std::pair<std::vector<std::int8_t>, double> quantize_symmetric8(std::span<const double> v);

QuantizedLayer quantize_layer(const KanLayer& layer);

// Residual level of a code, in units of h_q / 2: (2 (code - zp) + 1) above
// the zero point zp, 0 otherwise.
std::uint32_t relu_level(std::uint32_t code, const SplineGrid& grid, const HaqConfig& cfg);

// Integer-domain layer forward through a single shared LUT.
std::vector<double> quantized_layer_forward(const QuantizedLayer& layer,
                                            std::span<const std::uint32_t> codes,
                                            const ShLut& lut, const HaqConfig& cfg,
                                            LookupTrace* trace = nullptr);
std::vector<double> quantized_layer_forward(const KanLayer& layer,
                                            std::span<const std::uint32_t> codes,
                                            const ShLut& lut, const HaqConfig& cfg,
                                            LookupTrace* trace = nullptr);

}  // namespace kanedge
