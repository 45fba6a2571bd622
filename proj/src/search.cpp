#include "kanedge/search.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "kanedge/error.hpp"
#include "kanedge/json_util.hpp"
#include "kanedge/model_io.hpp"
#include "kanedge/parallel.hpp"
#include "kanedge/quantizer.hpp"

namespace kanedge {

void Constraints::validate() const {
  for (const auto& b : {area_max_mm2, energy_max_pj, latency_max_ns})
    if (b && !(*b > 0.0)) throw ConfigError("constraints: bounds must be > 0 when present");
}

std::string Constraints::violation(const CostReport& r) const {
  std::ostringstream os;
  os << std::setprecision(6);
  if (area_max_mm2 && r.area() * 1e-6 > *area_max_mm2)
    os << "area " << r.area() * 1e-6 << " mm2 > " << *area_max_mm2;
  else if (energy_max_pj && r.energy() > *energy_max_pj)
    os << "energy " << r.energy() << " pJ > " << *energy_max_pj;
  else if (latency_max_ns && r.latency() > *latency_max_ns)
    os << "latency " << r.latency() << " ns > " << *latency_max_ns;
  return os.str();
}

Constraints constraints_from_json(const nlohmann::json& j) {
  Constraints c;
  try {
    auto read = [&](const char* key, std::optional<double>& dst) {
      if (j.contains(key) && !j.at(key).is_null()) dst = j.at(key).get<double>();
    };
    read("area_max_mm2", c.area_max_mm2);
    read("energy_max_pj", c.energy_max_pj);
    read("latency_max_ns", c.latency_max_ns);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("constraints: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json constraints_to_json(const Constraints& c) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"area_max_mm2", opt(c.area_max_mm2)},
          {"energy_max_pj", opt(c.energy_max_pj)},
          {"latency_max_ns", opt(c.latency_max_ns)}};
}

int half_bits_for(EncoderMode mode) noexcept { return mode == EncoderMode::TdP ? 4 : 2; }

void SearchConfig::validate() const {
  if (candidates.empty()) throw ConfigError("search: at least one candidate architecture required");
  for (const auto& c : candidates) {
    if (c.size() < 2) throw ConfigError("search: a candidate needs input and output widths");
    for (int w : c)
      if (w < 1) throw ConfigError("search: widths must be >= 1");
  }
  if (K < 1) throw ConfigError("search: K must be >= 1");
  if (G_init < 1) throw ConfigError("search: G_init must be >= 1");
  if (E < 1) throw ConfigError("search: E must be >= 1");
  if (N_epochs < 1) throw ConfigError("search: N_epochs must be >= 1");
  if (max_G < G_init) throw ConfigError("search: max_G must be >= G_init");
  if (!(x_max > x_min)) throw ConfigError("search: x_max must exceed x_min");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    throw ConfigError("search: validation_fraction must lie in (0, 1)");
  if (!(rel_tolerance >= 0.0)) throw ConfigError("search: rel_tolerance must be >= 0");
  try {
    train.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

AcceleratorSpec SearchConfig::accelerator() const {
  AcceleratorSpec s;
  s.n_bits = n_bits;
  s.out_bits = 2 * half_bits_for(mode);
  s.scheme = EncoderScheme::Hybrid;
  s.array_rows = array_rows;
  return s;
}

SearchConfig search_config_from_json(const nlohmann::json& j) {
  SearchConfig c;
  try {
    c.candidates = j.at("candidates").get<std::vector<std::vector<int>>>();
    c.K = j.value("K", c.K);
    c.G_init = j.value("G_init", c.G_init);
    c.E = j.value("E", c.E);
    c.N_epochs = j.value("N_epochs", c.N_epochs);
    c.max_G = j.value("max_G", c.max_G);
    const auto mode = j.value("mode", std::string("TD-P"));
    if (mode == "TD-P")
      c.mode = EncoderMode::TdP;
    else if (mode == "TD-A")
      c.mode = EncoderMode::TdA;
    else
      throw ConfigError("search: mode must be TD-P or TD-A");
    c.seed = j.value("seed", c.seed);
    c.n_bits = j.value("n_bits", c.n_bits);
    c.array_rows = j.value("array_rows", c.array_rows);
    c.x_min = j.value("x_min", c.x_min);
    c.x_max = j.value("x_max", c.x_max);
    c.init_scale = j.value("init_scale", c.init_scale);
    c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
    c.rel_tolerance = j.value("rel_tolerance", c.rel_tolerance);
    c.train.learning_rate = j.value("learning_rate", c.train.learning_rate);
    c.train.batch_size = j.value("batch_size", c.train.batch_size);
    const auto loss = j.value("loss", std::string("cross-entropy"));
    if (loss == "cross-entropy")
      c.train.loss = Loss::CrossEntropy;
    else if (loss == "squared-error")
      c.train.loss = Loss::SquaredError;
    else
      throw ConfigError("search: loss must be cross-entropy or squared-error");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("search config: ") + e.what());
  }
  c.validate();
  return c;
}

FeasibilityResult feasible(std::span<const int> arch, int K, int G, const Constraints& constraints,
                           const UnitCosts& costs, const AcceleratorSpec& spec) {
  max_ld(G, spec.n_bits);  // throws InfeasibleError
  // Cost depends only on shapes; coefficient values are irrelevant.
  KanNetwork net;
  for (std::size_t t = 0; t + 1 < arch.size(); ++t)
    net.layers.emplace_back(arch[t], arch[t + 1], SplineGrid(G, K, -1.0, 1.0));
  FeasibilityResult r;
  r.cost = accelerator_cost(net, spec, costs);
  r.violation = constraints.violation(r.cost);
  r.ok = r.violation.empty();
  return r;
}

std::string_view to_string(Decision d) noexcept {
  switch (d) {
    case Decision::Extend: return "extend";
    case Decision::RevertStop: return "revert-stop";
    case Decision::ConstraintStop: return "constraint-stop";
  }
  return "?";
}

std::string network_hash(const KanNetwork& net) { return hex64(fnv1a64(model_to_json(net).dump())); }

SearchOutcome optimize(const Dataset& data, const Constraints& constraints, const SearchConfig& cfg,
                       const UnitCosts& costs) {
  cfg.validate();
  constraints.validate();
  const auto spec = cfg.accelerator();

  // Step 1: screen candidates at G_init.
  std::vector<FeasibilityResult> screen(cfg.candidates.size());
  parallel_for(cfg.candidates.size(), [&](std::size_t i) {
    try {
      screen[i] = feasible(cfg.candidates[i], cfg.K, cfg.G_init, constraints, costs, spec);
    } catch (const InfeasibleError& e) {
      screen[i].violation = e.what();
    }
  });
  std::size_t pick = screen.size();
  for (std::size_t i = 0; i < screen.size(); ++i)
    if (screen[i].ok) {
      pick = i;
      break;
    }
  if (pick == screen.size()) {
    std::string msg = "no candidate architecture meets the constraints at G = " + std::to_string(cfg.G_init);
    if (!screen.empty()) msg += " (first: " + screen[0].violation + ")";
    throw NoFeasibleStartError(msg);
  }
  const auto& arch = cfg.candidates[pick];
  if (data.n_features != arch.front()) throw ConfigError("search: dataset feature count differs from the architecture");

  const auto n_train = static_cast<std::size_t>(std::llround(data.size() * (1.0 - cfg.validation_fraction)));
  if (n_train == 0 || n_train >= data.size()) throw ConfigError("search: dataset too small to split");
  const auto [train_set, val_set] = split(data, n_train);

  SearchOutcome out;
  out.arch = arch;
  int G = cfg.G_init;
  KanNetwork net = random_network(arch, SplineGrid(G, cfg.K, cfg.x_min, cfg.x_max), cfg.init_scale, cfg.seed);
  CostReport cost = screen[pick].cost;
  out.initial_val_loss = evaluate_loss(net, val_set, cfg.train.loss);

  KanNetwork checkpoint = net;  // state at the previous boundary
  int checkpoint_G = G;
  CostReport checkpoint_cost = cost;
  double prev_best = out.initial_val_loss;

  for (std::uint64_t segment = 0;; ++segment) {
    TrainConfig tc = cfg.train;
    tc.epochs = cfg.N_epochs;
    tc.seed = cfg.seed + segment;
    const auto res = train(net, train_set, val_set, tc);
    net = res.net;

    SearchStep step;
    step.G = G;
    step.epochs = cfg.N_epochs;
    step.val_loss = res.val_loss.back();
    step.best_val_loss = *std::min_element(res.val_loss.begin(), res.val_loss.end());
    step.cost = cost;
    step.weights_hash = network_hash(net);

    const bool improved = step.best_val_loss < prev_best * (1.0 - cfg.rel_tolerance);
    if (!improved) {
      step.decision = Decision::RevertStop;
      step.reason = "validation loss did not improve";
      out.trace.push_back(step);
      net = checkpoint;
      G = checkpoint_G;
      cost = checkpoint_cost;
      out.final_val_loss = prev_best;
      break;
    }
    const int next = G + cfg.E;
    std::string block;
    std::optional<FeasibilityResult> next_cost;
    if (next > cfg.max_G) {
      block = "G + E exceeds max_G";
    } else {
      try {
        next_cost = feasible(arch, cfg.K, next, constraints, costs, spec);
        if (!next_cost->ok) block = next_cost->violation;
      } catch (const InfeasibleError& e) {
        block = e.what();
      }
    }
    if (!block.empty()) {
      step.decision = Decision::ConstraintStop;
      step.reason = block;
      out.trace.push_back(step);
      out.final_val_loss = step.val_loss;
      break;
    }
    step.decision = Decision::Extend;
    out.trace.push_back(step);
    checkpoint = net;
    checkpoint_G = G;
    checkpoint_cost = cost;
    prev_best = step.best_val_loss;
    net = grid_extend(net, next);
    G = next;
    cost = next_cost->cost;
  }
  out.net = std::move(net);
  out.final_G = G;
  out.final_cost = cost;
  out.weights_hash = network_hash(out.net);
  return out;
}

nlohmann::json outcome_to_json(const SearchOutcome& o) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : o.trace)
    steps.push_back({{"G", s.G},
                     {"epochs", s.epochs},
                     {"val_loss", s.val_loss},
                     {"best_val_loss", s.best_val_loss},
                     {"cost", cost_report_to_json(s.cost)},
                     {"decision", to_string(s.decision)},
                     {"reason", s.reason},
                     {"weights_hash", s.weights_hash}});
  return {{"arch", o.arch},
          {"final_G", o.final_G},
          {"initial_val_loss", o.initial_val_loss},
          {"final_val_loss", o.final_val_loss},
          {"final_cost", cost_report_to_json(o.final_cost)},
          {"weights_hash", o.weights_hash},
          {"trace", steps}};
}

std::string trace_csv(const SearchOutcome& o) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "step,G,val_loss,best_val_loss,area_mm2,energy_pj,latency_ns,decision\n";
  for (std::size_t i = 0; i < o.trace.size(); ++i) {
    const auto& s = o.trace[i];
    os << i << ',' << s.G << ',' << s.val_loss << ',' << s.best_val_loss << ',' << s.cost.area() * 1e-6 << ','
       << s.cost.energy() << ',' << s.cost.latency() << ',' << to_string(s.decision) << '\n';
  }
  return os.str();
}

}  // namespace kanedge
