#include "kanedge/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "kanedge/error.hpp"
#include "kanedge/json_util.hpp"

namespace kanedge {

namespace {

constexpr double kFjToPj = 1e-3;

const char* const kPrimitiveNames[] = {"lut_bit", "decoder_line", "tg",         "buffer", "dac_level",
                                       "delay_stage", "xbar_cell", "adc", "reg"};

PrimitiveCost* primitive(UnitCosts& c, std::size_t i) {
  PrimitiveCost* all[] = {&c.lut_bit,   &c.decoder_line, &c.tg,  &c.buffer, &c.dac_level,
                          &c.delay_stage, &c.xbar_cell,  &c.adc, &c.reg};
  return all[i];
}

double pow2(int b) { return std::ldexp(1.0, b); }

CostItem scaled(const PrimitiveCost& p, double count_area, double count_energy, double latency) {
  return {p.area * count_area, p.energy * count_energy * kFjToPj, latency};
}

}  // namespace

UnitCosts UnitCosts::synthetic_default() {
  UnitCosts c;
  c.label = "synthetic 22nm-class defaults, not calibrated to measured silicon";
  c.lut_bit = {0.3, 0.002, 0.2};
  c.decoder_line = {0.4, 0.05, 0.03};
  c.tg = {0.75, 0.1, 0.01};
  c.buffer = {0.5, 1.0, 0.02};
  c.dac_level = {0.1538, 0.41, 0.0};
  c.delay_stage = {0.5, 0.1, 0.0};
  c.xbar_cell = {0.1, 0.05, 5.0};
  c.adc = {300.0, 500.0, 10.0};
  c.reg = {4.17, 0.5, 0.05};
  c.unit_pulse_ns = 1.0;
  c.adc_share = 8;
  return c;
}

void UnitCosts::validate() const {
  UnitCosts copy = *this;
  for (std::size_t i = 0; i < std::size(kPrimitiveNames); ++i) {
    const auto* p = primitive(copy, i);
    for (double v : {p->area, p->energy, p->latency})
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ConfigError(std::string("unit costs: ") + kPrimitiveNames[i] + " values must be finite and >= 0");
  }
  if (!(unit_pulse_ns > 0.0)) throw ConfigError("unit costs: unit_pulse_ns must be > 0");
  if (adc_share < 1) throw ConfigError("unit costs: adc_share must be >= 1");
}

UnitCosts unit_costs_from_json(const nlohmann::json& j) {
  UnitCosts c;
  try {
    const int version = j.at("version").get<int>();
    if (version != kUnitCostsVersion)
      throw ConfigError("unit costs: unsupported version " + std::to_string(version));
    c.label = j.value("label", std::string());
    const auto& prims = j.at("primitives");
    for (std::size_t i = 0; i < std::size(kPrimitiveNames); ++i) {
      const auto& e = prims.at(kPrimitiveNames[i]);
      auto* p = primitive(c, i);
      p->area = e.at("area_um2").get<double>();
      p->energy = e.at("energy_fj").get<double>();
      p->latency = e.at("latency_ns").get<double>();
    }
    c.unit_pulse_ns = j.at("unit_pulse_ns").get<double>();
    c.adc_share = j.at("adc_share").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("unit costs: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json unit_costs_to_json(const UnitCosts& c) {
  nlohmann::json prims = nlohmann::json::object();
  UnitCosts copy = c;
  for (std::size_t i = 0; i < std::size(kPrimitiveNames); ++i) {
    const auto* p = primitive(copy, i);
    prims[kPrimitiveNames[i]] = {{"area_um2", p->area}, {"energy_fj", p->energy}, {"latency_ns", p->latency}};
  }
  return {{"version", kUnitCostsVersion},
          {"label", c.label},
          {"primitives", prims},
          {"unit_pulse_ns", c.unit_pulse_ns},
          {"adc_share", c.adc_share}};
}

UnitCosts load_unit_costs(const std::filesystem::path& path) { return unit_costs_from_json(read_json(path)); }

double CostReport::area() const noexcept {
  double s = 0.0;
  for (const auto& [k, v] : breakdown) s += v.area;
  return s;
}

double CostReport::energy() const noexcept {
  double s = 0.0;
  for (const auto& [k, v] : breakdown) s += v.energy;
  return s;
}

double CostReport::latency() const noexcept {
  double s = 0.0;
  for (const auto& [k, v] : breakdown) s += v.latency;
  return s;
}

void CostReport::add(const std::string& cls, CostItem item) {
  auto& e = breakdown[cls];
  e.area += item.area;
  e.energy += item.energy;
  e.latency += item.latency;
}

void CostReport::merge(const CostReport& other) {
  for (const auto& [k, v] : other.breakdown) add(k, v);
}

nlohmann::json cost_report_to_json(const CostReport& r) {
  nlohmann::json b = nlohmann::json::object();
  for (const auto& [k, v] : r.breakdown) b[k] = {{"area_um2", v.area}, {"energy_pj", v.energy}, {"latency_ns", v.latency}};
  return {{"area_um2", r.area()},
          {"area_mm2", r.area() * 1e-6},
          {"energy_pj", r.energy()},
          {"latency_ns", r.latency()},
          {"breakdown", b}};
}

namespace {

int resolve_ld(LookupMode mode, int G, int n_bits, int ld) {
  if (mode == LookupMode::Conventional) return ld;
  if (ld < 0) return max_ld(G, n_bits);
  if (!check_alignment(G, 1LL << ld, n_bits))
    throw InfeasibleError("LD = " + std::to_string(ld) + " violates G*2^LD <= 2^n for G = " +
                          std::to_string(G) + ", n = " + std::to_string(n_bits));
  return ld;
}

void check_lookup_args(int G, int K, int n_bits, int out_bits, int fanout) {
  if (G < 1 || K < 1) throw ArgumentError("lookup cost: G and K must be >= 1");
  if (n_bits < 1 || n_bits > 24) throw ArgumentError("lookup cost: n must lie in [1, 24]");
  if (out_bits < 1) throw ArgumentError("lookup cost: out_bits must be >= 1");
  if (fanout < 0) throw ArgumentError("lookup cost: fanout must be >= 0");
}

// Decoder of `bits` inputs: 2^bits output lines, depth proportional to bits.
CostItem decoder(int bits, double count, const UnitCosts& c) {
  if (bits == 0) return {};  // a single line is a wire
  return scaled(c.decoder_line, count * pow2(bits), count * pow2(bits), bits * c.decoder_line.latency);
}

}  // namespace

long long lookup_lut_bits(LookupMode mode, int G, int K, int n_bits, int ld, int out_bits) {
  check_lookup_args(G, K, n_bits, out_bits, 1);
  if (mode == LookupMode::Conventional) return static_cast<long long>(G + K) * (1LL << n_bits) * out_bits;
  ld = resolve_ld(mode, G, n_bits, ld);
  return static_cast<long long>((K + 2) / 2) * (1LL << ld) * out_bits;
}

CostReport lookup_path_cost(LookupMode mode, int G, int K, int n_bits, int ld, int out_bits, int fanout,
                            const UnitCosts& c) {
  check_lookup_args(G, K, n_bits, out_bits, fanout);
  CostReport r;
  if (fanout == 0) return r;
  const double f = fanout;
  const double ob = out_bits;
  if (mode == LookupMode::Conventional) {
    // Each input owns G+K LUTs, decoders and 2^n-to-1 selection trees.
    const double units = f * (G + K);
    const double entries = pow2(n_bits);
    r.add("lut", scaled(c.lut_bit, units * entries * ob, units * entries * ob, c.lut_bit.latency));
    r.add("decoder", decoder(n_bits, units, c));
    r.add("mux", scaled(c.tg, units * entries * ob, units * entries * ob, n_bits * c.tg.latency));
    return r;
  }
  ld = resolve_ld(mode, G, n_bits, ld);
  const double cells = pow2(ld);
  const double stored = (K + 2) / 2;
  // One SH-LUT per layer; every input reads K+1 pieces from it.
  r.add("lut", scaled(c.lut_bit, stored * cells * ob, f * (K + 1) * cells * ob, c.lut_bit.latency));
  // Global (n-LD)-bit and local LD-bit decoders work in parallel.
  const auto dg = decoder(n_bits - ld, f, c);
  const auto dl = decoder(ld, f, c);
  r.add("decoder", {dg.area + dl.area, dg.energy + dl.energy, std::max(dg.latency, dl.latency)});
  const double muxes = f * (K + 1);
  // With LD = 0 the local select is a wire.
  if (ld > 0) r.add("mux", scaled(c.tg, muxes * cells * ob, muxes * cells * ob, ld * c.tg.latency));
  r.add("demux", scaled(c.tg, muxes * G * ob, muxes * G * ob, c.tg.latency));
  return r;
}

CostReport encoder_cost(EncoderScheme scheme, int half_bits, const UnitCosts& c) {
  if (half_bits < 0 || half_bits > 12) throw ArgumentError("encoder cost: N must lie in [0, 12]");
  CostReport r;
  r.add("buffer", scaled(c.buffer, 1, 1, c.buffer.latency));
  if (half_bits == 0) {
    r.add("pulse", {0.0, 0.0, c.unit_pulse_ns});
    return r;
  }
  auto dac = [&](int bits) {
    const double units = (pow2(bits) - 1.0) * bits;
    return scaled(c.dac_level, units, units, 0.0);
  };
  auto chain = [&](double stages) { return scaled(c.delay_stage, stages, stages, 0.0); };
  const int n = half_bits;
  switch (scheme) {
    case EncoderScheme::PureVoltage:
      r.add("dac", dac(2 * n));
      break;
    case EncoderScheme::PurePWM:
      r.add("delay_chain", chain(pow2(2 * n) - 1.0));
      break;
    case EncoderScheme::Hybrid:
      r.add("dac", dac(n));
      r.add("delay_chain", chain(pow2(n) - 1.0));
      r.add("tg_mux", scaled(c.tg, pow2(n), pow2(n), c.tg.latency));
      r.add("pm_tcm", scaled(c.reg, 4, 4, c.reg.latency));
      break;
  }
  r.add("pulse", {0.0, 0.0, latency(scheme, n, c.unit_pulse_ns)});
  return r;
}

std::vector<FomRow> fom_compare(std::span<const EncoderConfig> cfgs, const UnitCosts& costs) {
  std::vector<FomRow> rows;
  for (const auto& cfg : cfgs) {
    UnitCosts c = costs;
    c.unit_pulse_ns = cfg.unit_width;
    const auto rep = encoder_cost(cfg.scheme, cfg.half_bits, c);
    FomRow row;
    row.scheme = cfg.scheme;
    row.half_bits = cfg.half_bits;
    row.area = rep.area();
    row.latency = rep.latency();
    row.power = rep.energy() / cfg.unit_width * 1e3;  // pJ/ns = mW -> uW
    row.fom = 1.0 / (row.area * row.power * row.latency);
    rows.push_back(row);
  }
  return rows;
}

namespace {

void check_spec(const AcceleratorSpec& s) {
  if (s.n_bits < 1 || s.n_bits > 24) throw ConfigError("accelerator: n_bits must lie in [1, 24]");
  if (s.out_bits < 1 || s.out_bits > 24) throw ConfigError("accelerator: out_bits must lie in [1, 24]");
  if (s.array_rows < 1) throw ConfigError("accelerator: array_rows must be >= 1");
}

// Encoders, cells and ADCs of one array-mapped layer.
void add_array_layer(CostReport& r, double word_lines, double active_lines, double cols,
                     EncoderScheme scheme, const AcceleratorSpec& spec, const UnitCosts& c) {
  const auto enc = encoder_cost(scheme, spec.half_bits(), c);
  r.add("encoder", {word_lines * enc.area(), active_lines * enc.energy(), enc.latency()});
  r.add("crossbar", scaled(c.xbar_cell, word_lines * cols, active_lines * cols, c.xbar_cell.latency));
  const double conversions = std::ceil(word_lines / spec.array_rows) * cols;
  const double adcs = std::ceil(conversions / c.adc_share);
  r.add("adc", scaled(c.adc, adcs, conversions, std::min<double>(c.adc_share, conversions) * c.adc.latency));
}

}  // namespace

CostReport accelerator_cost(const KanNetwork& net, const AcceleratorSpec& spec, const UnitCosts& costs) {
  CostReport r;
  if (net.layers.empty()) return r;
  net.validate();
  check_spec(spec);
  costs.validate();
  for (const auto& layer : net.layers) {
    const auto& g = layer.grid();
    // Lookup latency is on the per-layer critical path, like the other stages.
    r.merge(lookup_path_cost(LookupMode::Asp, g.intervals, g.degree, spec.n_bits, -1, spec.out_bits,
                             layer.n_in(), costs));
    const double block = g.basis_count() + 1.0;
    add_array_layer(r, layer.n_in() * block, layer.n_in() * (g.degree + 2.0), layer.n_out(), spec.scheme,
                    spec, costs);
  }
  return r;
}

std::size_t mlp_parameter_count(std::span<const int> widths) {
  std::size_t p = 0;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i)
    p += static_cast<std::size_t>(widths[i] + 1) * widths[i + 1];
  return p;
}

CostReport mlp_cost(std::span<const int> widths, const AcceleratorSpec& spec, const UnitCosts& costs) {
  CostReport r;
  if (widths.size() < 2) return r;
  check_spec(spec);
  costs.validate();
  for (int w : widths)
    if (w < 1) throw ConfigError("mlp: widths must be >= 1");
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const double lines = widths[i] + 1.0;
    add_array_layer(r, lines, lines, widths[i + 1], EncoderScheme::PureVoltage, spec, costs);
  }
  return r;
}

std::size_t accelerator_cells(const KanNetwork& net) {
  std::size_t n = 0;
  for (const auto& l : net.layers)
    n += static_cast<std::size_t>(l.n_in()) * (l.grid().basis_count() + 1) * l.n_out();
  return n;
}

std::size_t accelerator_cells(std::span<const int> widths, int G, int K) {
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i)
    n += static_cast<std::size_t>(widths[i]) * (G + K + 1) * widths[i + 1];
  return n;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

std::string fig10_csv(std::span<const int> grids, int K, int n_bits, int out_bits, int fanout,
                      const UnitCosts& costs) {
  std::ostringstream os;
  os << "G,LD,conv_area_um2,asp_area_um2,area_ratio,conv_energy_pj,asp_energy_pj,energy_ratio,conv_lut_bits,asp_lut_bits\n";
  for (int G : grids) {
    const int ld = max_ld(G, n_bits);
    const auto conv = lookup_path_cost(LookupMode::Conventional, G, K, n_bits, ld, out_bits, fanout, costs);
    const auto asp = lookup_path_cost(LookupMode::Asp, G, K, n_bits, ld, out_bits, fanout, costs);
    os << G << ',' << ld << ',' << fmt(conv.area()) << ',' << fmt(asp.area()) << ','
       << fmt(conv.area() / asp.area()) << ',' << fmt(conv.energy()) << ',' << fmt(asp.energy()) << ','
       << fmt(conv.energy() / asp.energy()) << ','
       << lookup_lut_bits(LookupMode::Conventional, G, K, n_bits, ld, out_bits) << ','
       << lookup_lut_bits(LookupMode::Asp, G, K, n_bits, ld, out_bits) << '\n';
  }
  return os.str();
}

std::string fig11_csv(std::span<const FomRow> rows) {
  std::ostringstream os;
  os << "scheme,N,area_um2,power_uw,latency_ns,fom\n";
  for (const auto& r : rows)
    os << to_string(r.scheme) << ',' << r.half_bits << ',' << fmt(r.area) << ',' << fmt(r.power) << ','
       << fmt(r.latency) << ',' << fmt(r.fom) << '\n';
  return os.str();
}

std::string fig13_csv(const std::vector<std::pair<std::string, CostReport>>& columns,
                      const std::vector<std::size_t>& params) {
  std::ostringstream os;
  os << "design,area_mm2,energy_pj,latency_ns,params\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const auto& [name, rep] = columns[i];
    os << name << ',' << fmt(rep.area() * 1e-6) << ',' << fmt(rep.energy()) << ',' << fmt(rep.latency()) << ','
       << (i < params.size() ? params[i] : 0) << '\n';
  }
  return os.str();
}

}  // namespace kanedge
