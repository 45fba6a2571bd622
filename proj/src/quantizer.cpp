#include "kanedge/quantizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <string>

#include "kanedge/error.hpp"
#include "kanedge/json_util.hpp"

namespace kanedge {

int max_ld(int intervals, int n_bits) {
  if (intervals < 1) throw ArgumentError("max_ld: G must be >= 1");
  if (n_bits < 1 || n_bits > 30) throw ArgumentError("max_ld: n must lie in [1, 30]");
  const long long range = 1LL << n_bits;
  if (intervals > range)
    throw InfeasibleError("max_ld: G = " + std::to_string(intervals) +
                          " exceeds 2^n = " + std::to_string(range));
  int ld = 0;
  while (static_cast<long long>(intervals) << (ld + 1) <= range) ++ld;
  return ld;
}

bool check_alignment(int intervals, long long cells_per_interval, int n_bits) {
  if (cells_per_interval < 1) return false;
  return static_cast<long long>(intervals) * cells_per_interval <= (1LL << n_bits);
}

bool is_power_of_two(long long v) noexcept { return v > 0 && (v & (v - 1)) == 0; }

HaqConfig HaqConfig::for_grid(const SplineGrid& grid, int n_bits, int out_bits,
                              bool is_signed) {
  HaqConfig cfg;
  cfg.n_bits = n_bits;
  cfg.intervals = grid.intervals;
  cfg.degree = grid.degree;
  cfg.out_bits = out_bits;
  cfg.is_signed = is_signed;
  cfg.ld = max_ld(grid.intervals, n_bits);
  return cfg;
}

void HaqConfig::validate() const {
  if (n_bits < 1 || n_bits > 30) throw ConfigError("haq: n must lie in [1, 30]");
  if (out_bits < 1 || out_bits > 24) throw ConfigError("haq: out_bits must lie in [1, 24]");
  if (intervals < 1 || degree < 1) throw ConfigError("haq: G and K must be >= 1");
  if (ld < 0 || !check_alignment(intervals, 1LL << ld, n_bits))
    throw ConfigError("haq: G * 2^LD = " + std::to_string(intervals) + " * 2^" +
                      std::to_string(ld) + " exceeds 2^" + std::to_string(n_bits));
}

void HaqConfig::check_grid(const SplineGrid& grid) const {
  if (grid.intervals != intervals || grid.degree != degree)
    throw ConfigError("haq config is for (G=" + std::to_string(intervals) +
                      ", K=" + std::to_string(degree) + ") but the layer grid is (G=" +
                      std::to_string(grid.intervals) + ", K=" +
                      std::to_string(grid.degree) + ")");
}

std::uint32_t quantize_input(double x, const SplineGrid& grid, const HaqConfig& cfg) {
  if (!std::isfinite(x)) throw ArgumentError("quantize_input: non-finite input");
  const long long cells = cfg.code_count();
  // Relative snap keeps values computed as x_min + j*h on the boundary.
  const double u = (x - grid.x_min) / (grid.x_max - grid.x_min) * cells;
  const double snapped = std::nearbyint(u);
  const double v = std::abs(u - snapped) <= 1e-9 * std::max(1.0, std::abs(u)) ? snapped : u;
  const long long code = static_cast<long long>(std::floor(std::clamp(v, 0.0, double(cells))));
  return static_cast<std::uint32_t>(std::clamp(code, 0LL, cells - 1));
}

double code_midpoint(std::uint32_t code, const SplineGrid& grid, const HaqConfig& cfg) {
  const double h_q = (grid.x_max - grid.x_min) / cfg.code_count();
  return grid.x_min + (code + 0.5) * h_q;
}

CodeSplit split_index(std::uint32_t code, int ld) noexcept {
  return {code >> ld, code & ((1u << ld) - 1u)};
}

namespace {
std::atomic<std::uint64_t> next_lut_id{1};
}

std::uint32_t quantized_piece(int degree, int m, std::uint32_t l, int ld, int out_bits) {
  const double t_mid = (l + 0.5) / static_cast<double>(1u << ld);
  const double v = cardinal_piece(degree, degree - m, t_mid);
  return static_cast<std::uint32_t>(std::nearbyint(v * ((1u << out_bits) - 1u)));
}

ShLut::ShLut(int degree, int ld, int out_bits)
    : degree_(degree), ld_(ld), out_bits_(out_bits), stored_((degree + 2) / 2),
      id_(next_lut_id.fetch_add(1)) {
  if (degree < 1) throw ArgumentError("build_sh_lut: K must be >= 1");
  if (ld < 0 || ld > 20) throw ArgumentError("build_sh_lut: LD must lie in [0, 20]");
  if (out_bits < 1 || out_bits > 24) throw ArgumentError("build_sh_lut: out_bits must lie in [1, 24]");
  const std::uint32_t cells = 1u << ld;
  entries_.resize(static_cast<std::size_t>(stored_) * cells);
  for (int m = 0; m < stored_; ++m)
    for (std::uint32_t l = 0; l < cells; ++l)
      entries_[m * cells + l] = quantized_piece(degree, m, l, ld, out_bits);
}

std::uint32_t ShLut::entry(int m, std::uint32_t l) const {
  return entries_.at(static_cast<std::size_t>(m) * cells() + l);
}

std::uint32_t ShLut::lookup(int m, std::uint32_t l) const {
  if (m < stored_) return entry(m, l);
  return entry(degree_ - m, static_cast<std::uint32_t>(cells() - 1 - l));
}

ShLut build_sh_lut(int degree, int ld, int out_bits) {
  return ShLut(degree, ld, out_bits);
}

std::string lut_csv(const ShLut& lut) {
  std::ostringstream out;
  out << "m,l,level\n";
  for (int m = 0; m < lut.stored_pieces(); ++m)
    for (std::uint32_t l = 0; l < lut.cells(); ++l)
      out << m << ',' << l << ',' << lut.entry(m, l) << '\n';
  return out.str();
}

void save_lut_csv(const ShLut& lut, const std::filesystem::path& path) {
  write_text_atomic(path, lut_csv(lut));
}

namespace {

void check_lut(const ShLut& lut, const HaqConfig& cfg) {
  if (lut.degree() != cfg.degree || lut.ld() != cfg.ld || lut.out_bits() != cfg.out_bits)
    throw ConfigError("LUT (K=" + std::to_string(lut.degree()) + ", LD=" +
                      std::to_string(lut.ld()) + ", bits=" + std::to_string(lut.out_bits()) +
                      ") does not match the quantization config");
}

}  // namespace

BAccess retrieve_b_values(std::uint32_t code, const ShLut& lut, const HaqConfig& cfg) {
  check_lut(lut, cfg);
  const auto s = split_index(code, cfg.ld);
  BAccess a{s.global, s.local, std::vector<std::uint32_t>(cfg.degree + 1)};
  for (int m = 0; m <= cfg.degree; ++m) a.levels[m] = lut.lookup(m, s.local);
  return a;
}

std::pair<std::vector<std::int8_t>, double> quantize_symmetric8(std::span<const double> v) {
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  const double scale = peak > 0.0 ? peak / 127.0 : 1.0;
  std::vector<std::int8_t> q(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    q[i] = static_cast<std::int8_t>(std::clamp(std::nearbyint(v[i] / scale), -127.0, 127.0));
  return {std::move(q), scale};
}

QuantizedLayer quantize_layer(const KanLayer& layer) {
  QuantizedLayer q;
  q.n_in = layer.n_in();
  q.n_out = layer.n_out();
  q.grid = layer.grid();
  std::tie(q.c, q.c_scale) = quantize_symmetric8(layer.coefficients());
  std::tie(q.w_b, q.w_b_scale) = quantize_symmetric8(layer.residual_weights());
  return q;
}

std::uint32_t relu_level(std::uint32_t code, const SplineGrid& grid, const HaqConfig& cfg) {
  const double h_q = (grid.x_max - grid.x_min) / cfg.code_count();
  const long long zp = std::clamp<long long>(std::llround(-grid.x_min / h_q), 0, cfg.code_count());
  const long long c = code;
  return c >= zp ? static_cast<std::uint32_t>(2 * (c - zp) + 1) : 0u;
}

std::vector<double> quantized_layer_forward(const QuantizedLayer& layer,
                                            std::span<const std::uint32_t> codes,
                                            const ShLut& lut, const HaqConfig& cfg,
                                            LookupTrace* trace) {
  cfg.check_grid(layer.grid);
  check_lut(lut, cfg);
  if (static_cast<int>(codes.size()) != layer.n_in)
    throw ArgumentError("quantized_layer_forward: expected " + std::to_string(layer.n_in) +
                        " codes, got " + std::to_string(codes.size()));
  const int k = cfg.degree;
  const double h_q = (layer.grid.x_max - layer.grid.x_min) / cfg.code_count();
  std::vector<long long> spline_acc(layer.n_out, 0), residual_acc(layer.n_out, 0);
  for (int in = 0; in < layer.n_in; ++in) {
    if (codes[in] >= cfg.code_count())
      throw ArgumentError("quantized_layer_forward: code out of range");
    const auto access = retrieve_b_values(codes[in], lut, cfg);
    if (trace) {
      trace->lut_ids.insert(lut.id());
      trace->lookups += access.levels.size();
    }
    const long long r = relu_level(codes[in], layer.grid, cfg);
    for (int out = 0; out < layer.n_out; ++out) {
      long long acc = 0;
      for (int m = 0; m <= k; ++m)
        acc += static_cast<long long>(layer.c_at(in, out, access.global + m)) * access.levels[m];
      spline_acc[out] += acc;
      residual_acc[out] += layer.w_b[static_cast<std::size_t>(in) * layer.n_out + out] * r;
    }
  }
  const double spline_unit = layer.c_scale / cfg.max_level();
  const double residual_unit = layer.w_b_scale * h_q / 2.0;
  std::vector<double> y(layer.n_out);
  for (int out = 0; out < layer.n_out; ++out)
    y[out] = spline_acc[out] * spline_unit + residual_acc[out] * residual_unit;
  return y;
}

std::vector<double> quantized_layer_forward(const KanLayer& layer,
                                            std::span<const std::uint32_t> codes,
                                            const ShLut& lut, const HaqConfig& cfg,
                                            LookupTrace* trace) {
  return quantized_layer_forward(quantize_layer(layer), codes, lut, cfg, trace);
}

}  // namespace kanedge
