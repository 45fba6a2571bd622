#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace kanedge {

enum class EncoderScheme { PureVoltage, PurePWM, Hybrid };

std::string_view to_string(EncoderScheme s) noexcept;
// Accepts "voltage", "pwm", "hybrid" (case-sensitive). Throws ArgumentError.
EncoderScheme parse_scheme(std::string_view name);

// Word-line encoder parameters. Currents in uA, widths in ns.
struct EncoderConfig {
  EncoderScheme scheme = EncoderScheme::Hybrid;
  int half_bits = 3;       // N; inputs carry 2N bits
  double unit_width = 1.0;  // W_p1
  double unit_current = 1.0;  // I1
  double sigma_current = 0.0;
  double sigma_width = 0.0;
  std::uint64_t seed = 0;

  std::uint32_t input_levels() const noexcept { return 1u << (2 * half_bits); }
  // Distinct current levels the scheme's DAC resolves within the shared swing.
  std::uint32_t current_levels() const noexcept;
  double current(std::uint32_t level) const noexcept { return level * unit_current; }
  // Std of the per-segment current error after swing sharing.
  double effective_sigma_current() const noexcept;

  void validate() const;
};

// Encoder presets for the two search modes. These N values are tool
// defaults, not measured design points.
EncoderConfig td_p_preset();  // N = 4
EncoderConfig td_a_preset();  // N = 2

struct Segment {
  std::uint32_t level = 0;  // current level index
  double width = 0.0;
};

struct Waveform {
  std::vector<Segment> segments;
};

struct ChargeResult {
  double charge = 0.0;    // uA * ns
  double duration = 0.0;  // ns
};

Waveform encode(std::uint32_t x, const EncoderConfig& cfg);
ChargeResult ideal_charge(const Waveform& w, const EncoderConfig& cfg);
ChargeResult noisy_charge(const Waveform& w, const EncoderConfig& cfg, std::mt19937_64& rng);

// Fixed sampling-window latency of a scheme, independent of the input value.
double latency(EncoderScheme scheme, int half_bits, double unit_width);

// Nearest ideal input for a measured charge, clamped to the input range.
std::uint32_t decode_charge(double charge, const EncoderConfig& cfg) noexcept;

struct YieldResult {
  double yield = 0.0;
  double standard_error = 0.0;
  std::size_t trials = 0;
};

// Monte-Carlo MAC yield: trial t draws x uniformly and perturbs its waveform
// with an engine seeded by (cfg.seed + t).
YieldResult mac_yield(const EncoderConfig& cfg, std::size_t trials);

}  // namespace kanedge
