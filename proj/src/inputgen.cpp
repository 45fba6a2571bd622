#include "kanedge/inputgen.hpp"

#include <algorithm>
#include <cmath>

#include "kanedge/error.hpp"
#include "kanedge/parallel.hpp"

namespace kanedge {

std::string_view to_string(EncoderScheme s) noexcept {
  switch (s) {
    case EncoderScheme::PureVoltage: return "voltage";
    case EncoderScheme::PurePWM: return "pwm";
    case EncoderScheme::Hybrid: return "hybrid";
  }
  return "?";
}

EncoderScheme parse_scheme(std::string_view name) {
  if (name == "voltage") return EncoderScheme::PureVoltage;
  if (name == "pwm") return EncoderScheme::PurePWM;
  if (name == "hybrid") return EncoderScheme::Hybrid;
  throw ArgumentError("unknown encoder scheme '" + std::string(name) +
                      "' (expected voltage, pwm or hybrid)");
}

std::uint32_t EncoderConfig::current_levels() const noexcept {
  switch (scheme) {
    case EncoderScheme::PureVoltage: return 1u << (2 * half_bits);
    case EncoderScheme::PurePWM: return 2;  // off / on
    case EncoderScheme::Hybrid: return 1u << half_bits;
  }
  return 0;
}

double EncoderConfig::effective_sigma_current() const noexcept {
  // All schemes share the hybrid DAC's swing; packing more levels into it
  // shrinks the level spacing relative to the same absolute noise.
  const double hybrid_steps = static_cast<double>((1u << half_bits) - 1u);
  if (hybrid_steps <= 0.0) return sigma_current;
  return sigma_current * (current_levels() - 1.0) / hybrid_steps;
}

void EncoderConfig::validate() const {
  if (half_bits < 1 || half_bits > 12) throw ArgumentError("encoder: N must lie in [1, 12]");
  if (!(unit_width > 0.0)) throw ArgumentError("encoder: W_p1 must be > 0");
  if (!(unit_current > 0.0)) throw ArgumentError("encoder: I1 must be > 0");
  if (sigma_current < 0.0 || sigma_width < 0.0)
    throw ArgumentError("encoder: noise sigmas must be >= 0");
}

EncoderConfig td_p_preset() {
  EncoderConfig cfg;
  cfg.half_bits = 4;
  return cfg;
}

EncoderConfig td_a_preset() {
  EncoderConfig cfg;
  cfg.half_bits = 2;
  return cfg;
}

Waveform encode(std::uint32_t x, const EncoderConfig& cfg) {
  cfg.validate();
  if (x >= cfg.input_levels())
    throw ArgumentError("encode: input " + std::to_string(x) + " exceeds " +
                        std::to_string(2 * cfg.half_bits) + " bits");
  const int n = cfg.half_bits;
  Waveform w;
  switch (cfg.scheme) {
    case EncoderScheme::Hybrid:
      w.segments.push_back({x >> n, (1u << n) * cfg.unit_width});
      w.segments.push_back({x & ((1u << n) - 1u), cfg.unit_width});
      break;
    case EncoderScheme::PureVoltage:
      w.segments.push_back({x, cfg.unit_width});
      break;
    case EncoderScheme::PurePWM:
      if (x > 0) w.segments.push_back({1, x * cfg.unit_width});
      break;
  }
  return w;
}

ChargeResult ideal_charge(const Waveform& w, const EncoderConfig& cfg) {
  ChargeResult r;
  for (const auto& s : w.segments) {
    r.charge += cfg.current(s.level) * s.width;
    r.duration += s.width;
  }
  return r;
}

ChargeResult noisy_charge(const Waveform& w, const EncoderConfig& cfg, std::mt19937_64& rng) {
  const double sigma_i = cfg.effective_sigma_current();
  std::normal_distribution<double> unit(0.0, 1.0);
  ChargeResult r;
  for (const auto& s : w.segments) {
    const double di = sigma_i > 0.0 ? sigma_i * unit(rng) : 0.0;
    const double dw = cfg.sigma_width > 0.0 ? cfg.sigma_width * unit(rng) : 0.0;
    r.charge += (cfg.current(s.level) + di) * (s.width + dw);
    r.duration += s.width;
  }
  return r;
}

double latency(EncoderScheme scheme, int half_bits, double unit_width) {
  switch (scheme) {
    case EncoderScheme::PureVoltage: return unit_width;
    case EncoderScheme::Hybrid: return ((1u << half_bits) + 1.0) * unit_width;
    case EncoderScheme::PurePWM: return static_cast<double>(1u << (2 * half_bits)) * unit_width;
  }
  return 0.0;
}

std::uint32_t decode_charge(double charge, const EncoderConfig& cfg) noexcept {
  const double q = charge / (cfg.unit_current * cfg.unit_width);
  const double top = cfg.input_levels() - 1.0;
  return static_cast<std::uint32_t>(std::clamp(std::nearbyint(q), 0.0, top));
}

YieldResult mac_yield(const EncoderConfig& cfg, std::size_t trials) {
  cfg.validate();
  if (trials == 0) throw ArgumentError("mac_yield: trials must be >= 1");
  std::vector<unsigned char> hit(trials, 0);
  parallel_for(trials, [&](std::size_t t) {
    std::mt19937_64 rng(cfg.seed + t);
    std::uniform_int_distribution<std::uint32_t> pick(0, cfg.input_levels() - 1);
    const std::uint32_t x = pick(rng);
    const auto q = noisy_charge(encode(x, cfg), cfg, rng);
    hit[t] = decode_charge(q.charge, cfg) == x;
  });
  std::size_t good = 0;
  for (auto h : hit) good += h;
  YieldResult r;
  r.trials = trials;
  r.yield = static_cast<double>(good) / trials;
  r.standard_error = std::sqrt(r.yield * (1.0 - r.yield) / trials);
  return r;
}

}  // namespace kanedge
