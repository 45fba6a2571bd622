#include "kanedge/pipeline.hpp"

#include <iomanip>
#include <sstream>

#include "kanedge/error.hpp"

namespace kanedge {

namespace {

std::string_view loss_name(Loss l) { return l == Loss::CrossEntropy ? "cross-entropy" : "squared-error"; }

Loss parse_loss(const std::string& s) {
  if (s == "cross-entropy") return Loss::CrossEntropy;
  if (s == "squared-error") return Loss::SquaredError;
  throw ConfigError("loss must be cross-entropy or squared-error, got '" + s + "'");
}

std::string_view ordering_name(RowOrdering o) {
  switch (o) {
    case RowOrdering::Identity: return "identity";
    case RowOrdering::Sam: return "sam";
    case RowOrdering::SamInterleaved: return "sam-interleaved";
  }
  return "?";
}

RowOrdering parse_ordering(const std::string& s) {
  if (s == "identity") return RowOrdering::Identity;
  if (s == "sam") return RowOrdering::Sam;
  if (s == "sam-interleaved") return RowOrdering::SamInterleaved;
  throw ConfigError("ordering must be identity, sam or sam-interleaved, got '" + s + "'");
}

}  // namespace

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c) {
  try {
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.seed = j.value("seed", c.seed);
    if (j.contains("loss")) c.loss = parse_loss(j.at("loss").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
  try {
    c.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

nlohmann::json train_config_to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"loss", loss_name(c.loss)}};
}

AnalogConfig analog_config_from_json(const nlohmann::json& j, AnalogConfig c) {
  try {
    c.n_bits = j.value("n_bits", c.n_bits);
    c.out_bits = j.value("out_bits", c.out_bits);
    c.stochastic = j.value("stochastic", c.stochastic);
    c.seed = j.value("seed", c.seed);
    if (j.contains("crossbar")) {
      const auto table = c.xbar.error_table;
      c.xbar = crossbar_config_from_json(j.at("crossbar"));
      if (!c.xbar.error_table) c.xbar.error_table = table;  // keep the base table
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("analog config: ") + e.what());
  }
  return c;
}

MapCompareConfig::MapCompareConfig() {
  analog.xbar.r_wire = 2.0;
  analog.xbar.adc_bits = 8;
  analog.xbar.error_table = ErrorTable::synthetic_default();
  analog.stochastic = true;
  train.epochs = 20;
  train.learning_rate = 0.5;
  train.loss = Loss::CrossEntropy;
}

void MapCompareConfig::validate() const {
  if (points.empty()) throw ConfigError("map-compare: no array points");
  for (const auto& p : points) {
    if (p.array_rows < 1 || p.G < 1) throw ConfigError("map-compare: array rows and G must be >= 1");
    if (p.G + K + 1 > p.array_rows)
      throw ConfigError("map-compare: G + K + 1 = " + std::to_string(p.G + K + 1) + " rows exceed array of " +
                        std::to_string(p.array_rows));
  }
  if (K < 1) throw ConfigError("map-compare: K must be >= 1");
  if (repeats < 1) throw ConfigError("map-compare: repeats must be >= 1");
  if (!(calib_sigma > 0.0)) throw ConfigError("map-compare: calibration sigma must be > 0");
  if (analog.stochastic && !analog.xbar.error_table)
    throw ConfigError("map-compare: stochastic runs need an error table");
}

MapCompareConfig map_compare_config_from_json(const nlohmann::json& j) {
  MapCompareConfig c;
  try {
    if (j.contains("points")) {
      c.points.clear();
      for (const auto& p : j.at("points")) c.points.push_back({p.at("array_rows").get<int>(), p.at("G").get<int>()});
    }
    c.K = j.value("K", c.K);
    c.hidden = j.value("hidden", c.hidden);
    c.repeats = j.value("repeats", c.repeats);
    c.seed = j.value("seed", c.seed);
    if (j.contains("sam")) c.sam = parse_ordering(j.at("sam").get<std::string>());
    c.calib_mu = j.value("calib_mu", c.calib_mu);
    c.calib_sigma = j.value("calib_sigma", c.calib_sigma);
    c.init_scale = j.value("init_scale", c.init_scale);
    if (j.contains("analog")) c.analog = analog_config_from_json(j.at("analog"), c.analog);
    if (j.contains("train")) c.train = train_config_from_json(j.at("train"), c.train);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("map-compare config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json map_compare_config_to_json(const MapCompareConfig& c) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : c.points) pts.push_back({{"array_rows", p.array_rows}, {"G", p.G}});
  return {{"points", pts},
          {"K", c.K},
          {"hidden", c.hidden},
          {"repeats", c.repeats},
          {"seed", c.seed},
          {"sam", ordering_name(c.sam)},
          {"calib_mu", c.calib_mu},
          {"calib_sigma", c.calib_sigma},
          {"init_scale", c.init_scale},
          {"analog",
           {{"n_bits", c.analog.n_bits},
            {"out_bits", c.analog.out_bits},
            {"stochastic", c.analog.stochastic},
            {"seed", c.analog.seed},
            {"crossbar", crossbar_config_to_json(c.analog.xbar)}}},
          {"train", train_config_to_json(c.train)}};
}

std::vector<MapCompareRow> map_compare(const Dataset& train_set, const Dataset& test_set,
                                       const MapCompareConfig& cfg) {
  cfg.validate();
  if (!train_set.is_classification() || !test_set.is_classification())
    throw ConfigError("map-compare: a labelled classification dataset is required");
  std::vector<int> widths{train_set.n_features};
  widths.insert(widths.end(), cfg.hidden.begin(), cfg.hidden.end());
  widths.push_back(train_set.n_outputs);

  std::vector<MapCompareRow> rows;
  for (const auto& pt : cfg.points) {
    TrainConfig tc = cfg.train;
    tc.seed = cfg.seed + kShuffleSeedOffset;
    const auto init = random_network(widths, SplineGrid(pt.G, cfg.K, -1.0, 1.0), cfg.init_scale,
                                     cfg.seed + kInitSeedOffset);
    const auto net = train(init, train_set, test_set, tc).net;
    const double float_acc = accuracy(net, test_set);

    AnalogConfig ac = cfg.analog;
    ac.xbar.rows = pt.array_rows;
    const auto plans = plan_network(net, ac.n_bits, ac.out_bits,
                                    InputDistribution::gaussian(cfg.calib_mu, cfg.calib_sigma));
    const auto identity = make_row_orders(net, pt.array_rows, RowOrdering::Identity, plans);
    const auto sam = make_row_orders(net, pt.array_rows, cfg.sam, plans);

    AnalogConfig ideal = ac;
    ideal.xbar.r_wire = 0.0;
    ideal.stochastic = false;
    const double ideal_acc = evaluate_mapping(net, ideal, test_set, identity);

    for (int r = 0; r < cfg.repeats; ++r) {
      ac.seed = cfg.seed + static_cast<std::uint64_t>(r);
      MapCompareRow row;
      row.array_rows = pt.array_rows;
      row.G = pt.G;
      row.rows_per_feature = pt.G + cfg.K + 1;
      row.seed = ac.seed;
      row.float_acc = float_acc;
      row.ideal_acc = ideal_acc;
      row.baseline_acc = evaluate_mapping(net, ac, test_set, identity);
      row.sam_acc = evaluate_mapping(net, ac, test_set, sam);
      rows.push_back(row);
    }
  }
  return rows;
}

std::string map_compare_csv(const std::vector<MapCompareRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "array_rows,G,rows_per_feature,seed,float_acc,ideal_acc,baseline_acc,sam_acc,benefit\n";
  for (const auto& r : rows)
    os << r.array_rows << ',' << r.G << ',' << r.rows_per_feature << ',' << r.seed << ',' << r.float_acc << ','
       << r.ideal_acc << ',' << r.baseline_acc << ',' << r.sam_acc << ',' << r.benefit() << '\n';
  return os.str();
}

void InputgenSweepConfig::validate() const {
  if (schemes.empty() || half_bits.empty() || sigmas.empty())
    throw ConfigError("sweep-inputgen: schemes, half_bits and sigmas must be non-empty");
  if (trials < 1) throw ConfigError("sweep-inputgen: trials must be >= 1");
  for (const auto& s : sigmas)
    if (s.current < 0.0 || s.width < 0.0) throw ConfigError("sweep-inputgen: sigmas must be >= 0");
  for (int n : half_bits) {
    EncoderConfig e;
    e.half_bits = n;
    e.unit_width = unit_width;
    e.unit_current = unit_current;
    try {
      e.validate();
    } catch (const ArgumentError& err) {
      throw ConfigError(err.what());
    }
  }
}

InputgenSweepConfig inputgen_sweep_config_from_json(const nlohmann::json& j) {
  InputgenSweepConfig c;
  try {
    if (j.contains("schemes")) {
      c.schemes.clear();
      for (const auto& s : j.at("schemes")) c.schemes.push_back(parse_scheme(s.get<std::string>()));
    }
    c.half_bits = j.value("half_bits", c.half_bits);
    if (j.contains("sigmas")) {
      c.sigmas.clear();
      for (const auto& s : j.at("sigmas")) c.sigmas.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
    }
    c.trials = j.value("trials", c.trials);
    c.unit_width = j.value("unit_width", c.unit_width);
    c.unit_current = j.value("unit_current", c.unit_current);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sweep-inputgen config: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("sweep-inputgen config: ") + e.what());
  }
  c.validate();
  return c;
}

std::vector<InputgenSweepRow> sweep_inputgen(const InputgenSweepConfig& cfg, const UnitCosts& costs) {
  cfg.validate();
  std::vector<InputgenSweepRow> rows;
  for (auto scheme : cfg.schemes)
    for (int n : cfg.half_bits) {
      EncoderConfig e;
      e.scheme = scheme;
      e.half_bits = n;
      e.unit_width = cfg.unit_width;
      e.unit_current = cfg.unit_current;
      e.seed = cfg.seed;
      const auto cost = fom_compare(std::span<const EncoderConfig>(&e, 1), costs).front();
      for (const auto& s : cfg.sigmas) {
        e.sigma_current = s.current;
        e.sigma_width = s.width;
        rows.push_back({scheme, n, s, mac_yield(e, cfg.trials), cost});
      }
    }
  return rows;
}

std::string sweep_inputgen_csv(const std::vector<InputgenSweepRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "scheme,N,sigma_I,sigma_W,yield,yield_se,latency_ns,area_um2,power_uw,fom\n";
  for (const auto& r : rows)
    os << to_string(r.scheme) << ',' << r.half_bits << ',' << r.sigma.current << ',' << r.sigma.width << ','
       << r.yield.yield << ',' << r.yield.standard_error << ',' << r.cost.latency << ',' << r.cost.area << ','
       << r.cost.power << ',' << r.cost.fom << '\n';
  return os.str();
}

std::vector<int> reference_mlp_widths() { return {17, 300, 300, 300, 14}; }

CostComparison compare_with_mlp(const KanNetwork& net, std::span<const int> mlp_widths,
                                const AcceleratorSpec& spec, const UnitCosts& costs) {
  CostComparison c;
  c.kan = accelerator_cost(net, spec, costs);
  c.mlp = mlp_cost(mlp_widths, spec, costs);
  c.kan_params = net.parameter_count();
  c.mlp_params = mlp_parameter_count(mlp_widths);
  return c;
}

void cross_validate(const KanNetwork& net, const HaqConfig& haq) {
  haq.validate();
  for (std::size_t t = 0; t < net.layers.size(); ++t) {
    try {
      haq.check_grid(net.layers[t].grid());
    } catch (const ConfigError& e) {
      throw ConfigError("layer " + std::to_string(t) + ": " + e.what());
    }
  }
}

HaqConfig haq_config_from_json(const nlohmann::json& j) {
  HaqConfig h;
  try {
    h.n_bits = j.value("n_bits", h.n_bits);
    h.intervals = j.at("G").get<int>();
    h.degree = j.at("K").get<int>();
    h.out_bits = j.value("out_bits", h.out_bits);
    h.is_signed = j.value("signed", h.is_signed);
    if (j.contains("ld") && !j.at("ld").is_null()) {
      h.ld = j.at("ld").get<int>();
    } else {
      try {
        h.ld = max_ld(h.intervals, h.n_bits);
      } catch (const ArgumentError& e) {
        throw ConfigError(std::string("haq config: ") + e.what());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("haq config: ") + e.what());
  }
  h.validate();
  return h;
}

nlohmann::json haq_config_to_json(const HaqConfig& h) {
  return {{"n_bits", h.n_bits}, {"ld", h.ld},           {"G", h.intervals},
          {"K", h.degree},      {"out_bits", h.out_bits}, {"signed", h.is_signed}};
}

}  // namespace kanedge
