#include <cmath>

#include "doctest.h"
#include "kanedge/cost_model.hpp"
#include "kanedge/error.hpp"
#include "kanedge/train.hpp"

using namespace kanedge;

namespace {

void check_breakdown(const CostReport& r) {
  double a = 0, e = 0, l = 0;
  for (const auto& [k, v] : r.breakdown) {
    a += v.area;
    e += v.energy;
    l += v.latency;
  }
  CHECK(r.area() == a);
  CHECK(r.energy() == e);
  CHECK(r.latency() == l);
}

bool no_decrease(const CostReport& lo, const CostReport& hi) {
  for (const auto& [k, v] : lo.breakdown) {
    auto it = hi.breakdown.find(k);
    if (it == hi.breakdown.end()) return false;
    if (it->second.area < v.area || it->second.energy < v.energy || it->second.latency < v.latency) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("unit costs round trip and validation") {
  const auto c = UnitCosts::synthetic_default();
  const auto back = unit_costs_from_json(unit_costs_to_json(c));
  CHECK(unit_costs_to_json(back) == unit_costs_to_json(c));
  auto j = unit_costs_to_json(c);
  j["version"] = 99;
  CHECK_THROWS_AS(unit_costs_from_json(j), ConfigError);
  j = unit_costs_to_json(c);
  j["primitives"]["tg"]["area_um2"] = -1.0;
  CHECK_THROWS_AS(unit_costs_from_json(j), ConfigError);
  j = unit_costs_to_json(c);
  j["primitives"].erase("adc");
  CHECK_THROWS_AS(unit_costs_from_json(j), ConfigError);
}

TEST_CASE("lut bit counts") {
  CHECK(lookup_lut_bits(LookupMode::Asp, 5, 3, 8, -1, 8) == 2 * 32 * 8);
  CHECK(lookup_lut_bits(LookupMode::Conventional, 5, 3, 8, -1, 8) == 8 * 256 * 8);
  for (int K = 1; K <= 5; ++K)
    for (int n = 4; n <= 12; ++n)
      for (int G = 2; G <= (1 << n) && G <= 300; ++G)
        REQUIRE(lookup_lut_bits(LookupMode::Asp, G, K, n, -1, 6) <
                lookup_lut_bits(LookupMode::Conventional, G, K, n, -1, 6));
  CHECK_THROWS_AS(lookup_path_cost(LookupMode::Asp, 300, 3, 8, -1, 8, 1, UnitCosts::synthetic_default()),
                  InfeasibleError);
  CHECK_THROWS_AS(lookup_path_cost(LookupMode::Asp, 5, 3, 8, 6, 8, 1, UnitCosts::synthetic_default()),
                  InfeasibleError);
}

TEST_CASE("lookup path area ratio grows with G") {
  const auto c = UnitCosts::synthetic_default();
  double prev = 0.0;
  for (int G : {8, 16, 32, 64}) {
    const auto conv = lookup_path_cost(LookupMode::Conventional, G, 3, 8, -1, 8, 17, c);
    const auto asp = lookup_path_cost(LookupMode::Asp, G, 3, 8, -1, 8, 17, c);
    check_breakdown(conv);
    check_breakdown(asp);
    const double ratio = conv.area() / asp.area();
    CHECK(ratio > prev);
    CHECK(conv.energy() > asp.energy());
    prev = ratio;
  }
  // Non-decreasing along G for every K, n where the sweep is feasible.
  for (int K = 2; K <= 4; ++K)
    for (int n = 6; n <= 10; ++n) {
      double p = 0.0;
      for (int G = 2; G <= (1 << n); G *= 2) {
        const double r = lookup_path_cost(LookupMode::Conventional, G, K, n, -1, 6, 4, c).area() /
                         lookup_path_cost(LookupMode::Asp, G, K, n, -1, 6, 4, c).area();
        CHECK(r >= p);
        p = r;
      }
    }
}

TEST_CASE("cost components are monotone") {
  const auto c = UnitCosts::synthetic_default();
  for (auto mode : {LookupMode::Conventional, LookupMode::Asp}) {
    // G at fixed LD, K, fanout and width.
    for (int G = 1; G < 16; ++G)
      CHECK(no_decrease(lookup_path_cost(mode, G, 3, 8, 4, 6, 3, c), lookup_path_cost(mode, G + 1, 3, 8, 4, 6, 3, c)));
    for (int K = 1; K < 6; ++K)
      CHECK(no_decrease(lookup_path_cost(mode, 5, K, 8, -1, 6, 3, c), lookup_path_cost(mode, 5, K + 1, 8, -1, 6, 3, c)));
    for (int f = 1; f < 20; ++f)
      CHECK(no_decrease(lookup_path_cost(mode, 5, 3, 8, -1, 6, f, c), lookup_path_cost(mode, 5, 3, 8, -1, 6, f + 1, c)));
    for (int b = 1; b < 12; ++b)
      CHECK(no_decrease(lookup_path_cost(mode, 5, 3, 8, -1, b, 3, c), lookup_path_cost(mode, 5, 3, 8, -1, b + 1, 3, c)));
  }
  const SplineGrid grid(5, 3, -1.0, 1.0);
  AcceleratorSpec spec;
  auto kan = [&](int a, int b, int K, int ob) {
    const int w[] = {a, b};
    AcceleratorSpec s = spec;
    s.out_bits = ob;
    return accelerator_cost(random_network(w, SplineGrid(5, K, -1.0, 1.0), 0.1, 1), s, c);
  };
  for (int i = 1; i < 10; ++i) {
    CHECK(no_decrease(kan(i, 3, 3, 6), kan(i + 1, 3, 3, 6)));
    CHECK(no_decrease(kan(3, i, 3, 6), kan(3, i + 1, 3, 6)));
  }
  for (int K = 1; K < 5; ++K) CHECK(no_decrease(kan(4, 4, K, 6), kan(4, 4, K + 1, 6)));
  for (int ob = 2; ob < 12; ++ob) CHECK(no_decrease(kan(4, 4, 3, ob), kan(4, 4, 3, ob + 1)));
}

TEST_CASE("encoder costs") {
  const auto c = UnitCosts::synthetic_default();
  for (auto s : {EncoderScheme::PureVoltage, EncoderScheme::PurePWM, EncoderScheme::Hybrid}) {
    const auto r = encoder_cost(s, 0, c);
    CHECK(r.area() == c.buffer.area);
    CHECK(r.energy() == doctest::Approx(c.buffer.energy * 1e-3));
    check_breakdown(encoder_cost(s, 3, c));
  }
  const auto v = encoder_cost(EncoderScheme::PureVoltage, 3, c);
  const auto p = encoder_cost(EncoderScheme::PurePWM, 3, c);
  const auto h = encoder_cost(EncoderScheme::Hybrid, 3, c);
  CHECK(v.area() > h.area());
  CHECK(p.area() > h.area());
  for (int n = 1; n <= 4; ++n) {
    const double dac = encoder_cost(EncoderScheme::PureVoltage, n, c).breakdown.at("dac").area;
    const double dac2 = encoder_cost(EncoderScheme::PureVoltage, 2 * n, c).breakdown.at("dac").area;
    CHECK(dac2 > 2 * dac);
  }
}

TEST_CASE("fom ordering") {
  const auto c = UnitCosts::synthetic_default();
  std::vector<EncoderConfig> cfgs(3);
  cfgs[0].scheme = EncoderScheme::PureVoltage;
  cfgs[1].scheme = EncoderScheme::PurePWM;
  cfgs[2].scheme = EncoderScheme::Hybrid;
  const auto rows = fom_compare(cfgs, c);
  CHECK(rows[2].fom > rows[0].fom);
  CHECK(rows[2].fom > rows[1].fom);
  std::vector<EncoderConfig> same(2);
  const auto twin = fom_compare(same, c);
  CHECK(twin[0].fom == twin[1].fom);
  CHECK(fig11_csv(rows).rfind("scheme,N,area_um2,power_uw,latency_ns,fom\n", 0) == 0);
}

TEST_CASE("accelerator parameter and cell counts") {
  const int w[] = {17, 1, 14};
  const auto net = random_network(w, SplineGrid(5, 3, -1.0, 1.0), 0.1, 1);
  CHECK(net.parameter_count() == 279);
  CHECK(accelerator_cells(net) == 279);
  CHECK(accelerator_cells(w, 5, 3) == 279);
  const int mlp[] = {17, 300, 300, 300, 14};
  CHECK(mlp_parameter_count(mlp) == 190214);

  const auto c = UnitCosts::synthetic_default();
  const AcceleratorSpec spec;
  const auto k = accelerator_cost(net, spec, c);
  const auto m = mlp_cost(mlp, spec, c);
  check_breakdown(k);
  check_breakdown(m);
  CHECK(k.area() < m.area());
  CHECK(k.energy() < m.energy());
  CHECK(k.latency() < m.latency());
  CHECK(accelerator_cost(KanNetwork{}, spec, c).area() == 0.0);
  CHECK(accelerator_cost(KanNetwork{}, spec, c).breakdown.empty());
  const auto j = cost_report_to_json(k);
  CHECK(j["area_um2"].get<double>() == k.area());
}
