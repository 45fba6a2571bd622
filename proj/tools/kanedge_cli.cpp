// kanedge: command-line front end. Every command writes its tables and a
// manifest.json into --out; `kanedge rerun --manifest M` replays a run.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kanedge/cost_model.hpp"
#include "kanedge/dataset.hpp"
#include "kanedge/error.hpp"
#include "kanedge/json_util.hpp"
#include "kanedge/mapper.hpp"
#include "kanedge/model_io.hpp"
#include "kanedge/pipeline.hpp"
#include "kanedge/quantizer.hpp"
#include "kanedge/search.hpp"
#include "kanedge/train.hpp"
#include "kanedge/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kanedge;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kInfeasible = 3, kRuntime = 4 };

struct Options {
  std::string config;
  std::string out = ".";
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::string model;
  std::string data;
  std::string manifest;
};

// Options whose values are file paths; recorded as absolute paths.
const std::set<std::string> kPathOptions = {"config", "model", "data", "manifest"};

// Generic CSV -> array of records, numbers kept numeric.
json csv_to_json(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  auto cells = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ss(l);
    std::string c;
    while (std::getline(ss, c, ',')) out.push_back(c);
    return out;
  };
  const auto header = cells(line);
  json rows = json::array();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto v = cells(line);
    json row = json::object();
    for (std::size_t i = 0; i < header.size() && i < v.size(); ++i) {
      char* end = nullptr;
      const double d = std::strtod(v[i].c_str(), &end);
      if (!v[i].empty() && end == v[i].c_str() + v[i].size())
        row[header[i]] = d;
      else
        row[header[i]] = v[i];
    }
    rows.push_back(row);
  }
  return rows;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

class Run {
 public:
  Run(std::string command, std::vector<std::string> args, const Options& opt)
      : command_(std::move(command)), args_(std::move(args)), opt_(opt), out_(opt.out) {
    if (opt_.format != "csv" && opt_.format != "json") throw ConfigError("--format must be csv or json");
    std::error_code ec;
    fs::create_directories(out_, ec);
    if (ec) throw ConfigError("cannot create output directory " + out_.string() + ": " + ec.message());
  }

  // The --config document, or an empty object when none is given.
  const json& config() {
    if (!config_) {
      if (opt_.config.empty()) {
        config_ = json::object();
      } else {
        config_ = read_json(opt_.config);
        base_ = fs::absolute(opt_.config).parent_path();
      }
    }
    return *config_;
  }

  // Paths inside a config resolve against the config's directory.
  fs::path resolve(const std::string& p) const {
    const fs::path path(p);
    if (path.is_absolute() || base_.empty()) return path;
    return base_ / path;
  }

  std::string read_text(const fs::path& path) {
    const auto text = kanedge::read_text(path);
    inputs_[fs::absolute(path).lexically_normal().string()] = hex64(fnv1a64(text));
    return text;
  }

  json read_json(const fs::path& path) {
    const auto text = read_text(path);
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }

  // Reads a JSON value that may be inline or a path string.
  json section(const json& j, const char* key) {
    if (!j.contains(key)) return json::object();
    const auto& v = j.at(key);
    if (v.is_string()) return read_json(resolve(v.get<std::string>()));
    return v;
  }

  bool has_model() { return !opt_.model.empty() || config().contains("model"); }

  KanNetwork model(const std::string& key = "model") {
    std::string path = opt_.model;
    if (path.empty()) {
      if (!config().contains(key)) throw ConfigError("no model given (--model or \"" + key + "\" in the config)");
      path = resolve(config().at(key).get<std::string>()).string();
    }
    return model_from_json(read_json(path));
  }

  // Dataset from --data or the config's "data" entry; nullopt when neither.
  std::optional<Dataset> dataset(int n_classes = 0) {
    std::string path = opt_.data;
    if (path.empty() && config().contains("data")) path = resolve(config().at("data").get<std::string>()).string();
    if (path.empty()) return std::nullopt;
    return parse_dataset_csv(read_text(path), path, n_classes);
  }

  UnitCosts costs() {
    if (!config().contains("costs")) {
      info_["unit_costs"] = "synthetic default";
      return UnitCosts::synthetic_default();
    }
    const auto c = unit_costs_from_json(section(config(), "costs"));
    info_["unit_costs"] = c.label;
    return c;
  }

  std::uint64_t seed(std::uint64_t fallback) {
    seed_ = opt_.seed ? *opt_.seed : config().value("seed", fallback);
    return *seed_;
  }

  void table(const std::string& stem, const std::string& csv) {
    if (opt_.format == "json")
      write(stem + ".json", csv_to_json(csv).dump(2) + "\n");
    else
      write(stem + ".csv", csv);
  }

  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  void write(const std::string& name, const std::string& text) {
    write_text_atomic(out_ / name, text);
    outputs_[name] = hex64(fnv1a64(text));
  }

  json& info() { return info_; }

  void finish() {
    json m = {{"tool", "kanedge"},
              {"version", kToolVersion},
              {"command", command_},
              {"args", args_},
              {"seed", seed_ ? json(*seed_) : json(nullptr)},
              {"inputs", inputs_},
              {"outputs", outputs_},
              {"info", info_},
              {"created_utc", utc_now()}};
    write_text_atomic(out_ / "manifest.json", m.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  Options opt_;
  fs::path out_;
  fs::path base_;
  std::optional<json> config_;
  std::optional<std::uint64_t> seed_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> outputs_;
  json info_ = json::object();
};

SurrogateSpec surrogate_from_json(const json& j, std::uint64_t sample_seed) {
  SurrogateSpec s;
  try {
    s.n_features = j.value("n_features", s.n_features);
    s.n_classes = j.value("n_classes", s.n_classes);
    s.samples = j.value("samples", s.samples);
    s.input_sigma = j.value("input_sigma", s.input_sigma);
    s.label_noise = j.value("label_noise", s.label_noise);
    s.teacher_seed = j.value("teacher_seed", s.teacher_seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("surrogate config: ") + e.what());
  }
  s.sample_seed = sample_seed;
  return s;
}

// Data for training commands: the given file, else the default surrogate.
Dataset training_data(Run& run, int n_classes, std::uint64_t sample_seed) {
  if (auto d = run.dataset(n_classes)) return *d;
  const auto spec = surrogate_from_json(run.section(run.config(), "surrogate"), sample_seed);
  run.info()["data"] = "surrogate";
  return make_surrogate(spec);
}

std::size_t split_count(std::size_t n, double validation_fraction) {
  const auto k = static_cast<std::size_t>(std::llround(n * (1.0 - validation_fraction)));
  if (k == 0 || k >= n) throw ConfigError("dataset of " + std::to_string(n) + " rows is too small to split");
  return k;
}

// ---- commands -------------------------------------------------------------

void cmd_gen_data(Run& run) {
  const auto seed = run.seed(1);
  const auto spec = surrogate_from_json(run.config(), seed);
  const auto data = make_surrogate(spec);
  run.write("data.csv", dataset_csv(data));
  run.info()["rows"] = data.size();
  run.info()["n_features"] = data.n_features;
  run.info()["n_classes"] = data.n_outputs;
}

void cmd_fit(Run& run) {
  const auto& c = run.config();
  const auto seed = run.seed(0);
  std::vector<int> widths;
  int G = 5, K = 3;
  double x_min = -1.0, x_max = 1.0, init_scale = 0.1, vf = 0.2;
  try {
    widths = c.value("widths", std::vector<int>{17, 1, 14});
    G = c.value("G", G);
    K = c.value("K", K);
    x_min = c.value("x_min", x_min);
    x_max = c.value("x_max", x_max);
    init_scale = c.value("init_scale", init_scale);
    vf = c.value("validation_fraction", vf);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("fit config: ") + e.what());
  }
  if (widths.size() < 2) throw ConfigError("fit: widths needs at least two entries");
  TrainConfig tc = train_config_from_json(run.section(c, "train"));
  tc.seed = seed + kShuffleSeedOffset;
  const auto data = training_data(run, widths.back(), seed);
  if (data.n_features != widths.front() || data.n_outputs != widths.back())
    throw ConfigError("fit: dataset shape " + std::to_string(data.n_features) + " -> " +
                      std::to_string(data.n_outputs) + " does not match widths");
  const auto [tr, val] = split(data, split_count(data.size(), vf));
  const auto init = random_network(widths, SplineGrid(G, K, x_min, x_max), init_scale, seed + kInitSeedOffset);
  const auto res = train(init, tr, val, tc);

  std::ostringstream log;
  log << std::setprecision(10) << "epoch,train_loss,val_loss\n";
  log << 0 << ',' << res.initial_train_loss << ',' << res.initial_val_loss << '\n';
  for (std::size_t e = 0; e < res.train_loss.size(); ++e)
    log << e + 1 << ',' << res.train_loss[e] << ',' << res.val_loss[e] << '\n';
  run.write_json("model.json", model_to_json(res.net));
  run.table("train_log", log.str());
  run.info()["parameters"] = res.net.parameter_count();
  run.info()["train_rows"] = tr.size();
  run.info()["validation_rows"] = val.size();
}

HaqConfig haq_for(Run& run, const KanNetwork& net) {
  const auto& c = run.config();
  HaqConfig haq;
  if (c.contains("haq")) {
    haq = haq_config_from_json(run.section(c, "haq"));
  } else {
    haq = HaqConfig::for_grid(net.layers.front().grid(), 8, 8);
  }
  cross_validate(net, haq);
  return haq;
}

void cmd_quantize(Run& run) {
  const auto net = run.model();
  const auto haq = haq_for(run, net);
  const auto seed = run.seed(0);
  const auto lut = build_sh_lut(haq.degree, haq.ld, haq.out_bits);
  run.table("lut", lut_csv(lut));

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> code(0, static_cast<std::uint32_t>(haq.code_count() - 1));
  const int samples = run.config().value("samples", 256);
  std::ostringstream rep;
  rep << std::setprecision(10) << "layer,n_in,n_out,G,K,LD,lut_entries,c_scale,w_b_scale,mean_abs_error\n";
  json layers = json::array();
  for (std::size_t t = 0; t < net.layers.size(); ++t) {
    const auto& layer = net.layers[t];
    const auto q = quantize_layer(layer);
    std::vector<std::uint32_t> codes(layer.n_in());
    std::vector<double> mid(layer.n_in());
    double err = 0.0;
    for (int s = 0; s < samples; ++s) {
      for (int i = 0; i < layer.n_in(); ++i) {
        codes[i] = code(rng);
        mid[i] = code_midpoint(codes[i], layer.grid(), haq);
      }
      const auto yq = quantized_layer_forward(q, codes, lut, haq);
      const auto yf = layer_forward(layer, mid);
      for (int o = 0; o < layer.n_out(); ++o) err += std::abs(yq[o] - yf[o]);
    }
    err /= static_cast<double>(samples) * layer.n_out();
    rep << t << ',' << layer.n_in() << ',' << layer.n_out() << ',' << haq.intervals << ',' << haq.degree << ','
        << haq.ld << ',' << lut.stored_entries() << ',' << q.c_scale << ',' << q.w_b_scale << ',' << err << '\n';
    layers.push_back({{"n_in", q.n_in},
                      {"n_out", q.n_out},
                      {"c_scale", q.c_scale},
                      {"w_b_scale", q.w_b_scale},
                      {"c", std::vector<int>(q.c.begin(), q.c.end())},
                      {"w_b", std::vector<int>(q.w_b.begin(), q.w_b.end())}});
  }
  run.table("quantize_report", rep.str());
  run.write_json("quantized.json", {{"haq", haq_config_to_json(haq)}, {"layers", layers}});
  run.info()["lut_entries"] = lut.stored_entries();
  run.info()["ld"] = haq.ld;
}

RowOrdering ordering_from(const std::string& s) {
  if (s == "identity") return RowOrdering::Identity;
  if (s == "sam") return RowOrdering::Sam;
  if (s == "sam-interleaved") return RowOrdering::SamInterleaved;
  throw ConfigError("unknown ordering '" + s + "'");
}

void cmd_sim(Run& run) {
  const auto& c = run.config();
  const auto net = run.model();
  const auto haq = haq_for(run, net);
  const auto seed = run.seed(0);
  const auto data = run.dataset(net.n_out());
  if (!data) throw ConfigError("sim: a dataset is required (--data or \"data\")");
  if (data->n_features != net.n_in()) throw ConfigError("sim: dataset feature count does not match the model");

  AnalogConfig ac;
  ac.n_bits = haq.n_bits;
  ac.out_bits = haq.out_bits;
  ac.xbar = crossbar_config_from_json(run.section(c, "crossbar"));
  if (c.contains("error_table")) ac.xbar.error_table = error_table_from_json(run.section(c, "error_table"));
  ac.stochastic = c.value("stochastic", false);
  const int repeats = c.value("repeats", 1);
  if (repeats < 1) throw ConfigError("sim: repeats must be >= 1");
  const auto dist = c.contains("calibration") ? distribution_from_json(run.section(c, "calibration"))
                                              : InputDistribution::uniform();
  const auto names = c.value("orderings", std::vector<std::string>{"identity", "sam", "sam-interleaved"});
  const auto plans = plan_network(net, ac.n_bits, ac.out_bits, dist);
  const double float_acc = accuracy(net, *data);

  std::ostringstream os;
  os << std::setprecision(10) << "ordering,seed,accuracy,float_accuracy\n";
  for (const auto& name : names) {
    const auto orders = make_row_orders(net, ac.xbar.rows, ordering_from(name), plans);
    for (int r = 0; r < repeats; ++r) {
      ac.seed = seed + static_cast<std::uint64_t>(r);
      os << name << ',' << ac.seed << ',' << evaluate_mapping(net, ac, *data, orders) << ',' << float_acc << '\n';
    }
  }
  run.table("sim", os.str());
  json pj = json::array();
  for (const auto& p : plans) pj.push_back(plan_to_json(p));
  run.write_json("mapping_plan.json", pj);
  run.info()["array_rows"] = ac.xbar.rows;
  run.info()["rows_per_feature"] = net.layers.front().basis_count() + 1;
}

void cmd_sweep_inputgen(Run& run) {
  auto cfg = inputgen_sweep_config_from_json(run.config());
  cfg.seed = run.seed(cfg.seed);
  const auto rows = sweep_inputgen(cfg, run.costs());
  run.table("sweep_inputgen", sweep_inputgen_csv(rows));
  run.info()["trials"] = cfg.trials;
}

void cmd_map_compare(Run& run) {
  const auto& c = run.config();
  auto cfg = map_compare_config_from_json(c);
  cfg.seed = run.seed(cfg.seed);
  if (c.contains("error_table")) cfg.analog.xbar.error_table = error_table_from_json(run.section(c, "error_table"));
  const auto data = training_data(run, 0, c.value("data_seed", std::uint64_t{1}));
  const auto n_train = c.value("train_rows", std::size_t{2000});
  if (n_train == 0 || n_train >= data.size()) throw ConfigError("map-compare: train_rows must be in (0, rows)");
  const auto [tr, te] = split(data, n_train);
  const auto rows = map_compare(tr, te, cfg);
  run.table("map_compare", map_compare_csv(rows));

  std::ostringstream os;
  os << std::setprecision(10)
     << "array_rows,G,rows_per_feature,repeats,mean_baseline_acc,mean_sam_acc,mean_benefit,sam_not_worse\n";
  json rpf = json::array();
  for (const auto& pt : cfg.points) {
    double b = 0, s = 0;
    int n = 0, wins = 0;
    for (const auto& r : rows)
      if (r.array_rows == pt.array_rows && r.G == pt.G) {
        b += r.baseline_acc;
        s += r.sam_acc;
        wins += r.sam_acc >= r.baseline_acc;
        ++n;
      }
    os << pt.array_rows << ',' << pt.G << ',' << pt.G + cfg.K + 1 << ',' << n << ',' << b / n << ',' << s / n << ','
       << (s - b) / n << ',' << wins << '\n';
    rpf.push_back({{"array_rows", pt.array_rows}, {"G", pt.G}, {"rows_per_feature", pt.G + cfg.K + 1}});
  }
  run.table("map_compare_summary", os.str());
  run.info()["rows_per_feature"] = rpf;
  run.info()["resolved_config"] = map_compare_config_to_json(cfg);
}

void cmd_cost(Run& run) {
  const auto& c = run.config();
  const auto costs = run.costs();
  AcceleratorSpec spec;
  spec.n_bits = c.value("n_bits", spec.n_bits);
  spec.out_bits = c.value("out_bits", spec.out_bits);
  spec.array_rows = c.value("array_rows", spec.array_rows);
  if (c.contains("scheme")) spec.scheme = parse_scheme(c.at("scheme").get<std::string>());

  const auto grids = c.value("fig10_grids", std::vector<int>{8, 16, 32, 64});
  const int K = c.value("fig10_K", 3);
  const int fanout = c.value("fig10_fanout", 1);
  run.table("fig10", fig10_csv(grids, K, spec.n_bits, spec.out_bits, fanout, costs));

  std::vector<EncoderConfig> encs;
  for (int n : c.value("fig11_half_bits", std::vector<int>{3}))
    for (auto s : {EncoderScheme::PureVoltage, EncoderScheme::PurePWM, EncoderScheme::Hybrid}) {
      EncoderConfig e;
      e.scheme = s;
      e.half_bits = n;
      e.unit_width = costs.unit_pulse_ns;
      encs.push_back(e);
    }
  run.table("fig11", fig11_csv(fom_compare(encs, costs)));

  // Costs depend only on shapes, so a width chain alone is enough.
  KanNetwork net;
  if (run.has_model()) {
    net = run.model();
  } else {
    net = random_network(c.value("widths", std::vector<int>{17, 1, 14}),
                         SplineGrid(c.value("G", 5), c.value("K", 3), -1.0, 1.0), 0.1, 0);
  }
  if (c.contains("haq")) {
    const auto haq = haq_for(run, net);
    spec.n_bits = haq.n_bits;
    spec.out_bits = haq.out_bits;
  }
  const auto mlp = c.value("mlp_widths", reference_mlp_widths());
  const auto cmp = compare_with_mlp(net, mlp, spec, costs);
  run.table("fig13", fig13_csv({{"kan", cmp.kan}, {"mlp", cmp.mlp}}, {cmp.kan_params, cmp.mlp_params}));
  run.write_json("cost_report.json", {{"kan", cost_report_to_json(cmp.kan)},
                                      {"mlp", cost_report_to_json(cmp.mlp)},
                                      {"kan_params", cmp.kan_params},
                                      {"mlp_params", cmp.mlp_params}});
}

void cmd_search(Run& run) {
  const auto& c = run.config();
  auto cfg = search_config_from_json(c);
  cfg.seed = run.seed(cfg.seed);
  const auto constraints = constraints_from_json(run.section(c, "constraints"));
  const auto costs = run.costs();
  const auto data = training_data(run, cfg.candidates.front().back(), c.value("data_seed", std::uint64_t{1}));
  const auto out = optimize(data, constraints, cfg, costs);
  run.write_json("search_trace.json", outcome_to_json(out));
  run.table("search_trace", trace_csv(out));
  run.write_json("model.json", model_to_json(out.net));
  run.info()["final_G"] = out.final_G;
  run.info()["constraints"] = constraints_to_json(constraints);
}

// ---- dispatch -------------------------------------------------------------

std::vector<std::string> recorded_args(const CLI::App* sub) {
  std::vector<std::string> args;
  for (const auto* opt : sub->get_options()) {
    if (opt->count() == 0 || opt->get_lnames().empty()) continue;
    const auto& name = opt->get_lnames().front();
    if (name == "out" || name == "help") continue;
    for (auto v : opt->results()) {
      if (kPathOptions.count(name)) v = fs::absolute(v).lexically_normal().string();
      args.push_back("--" + name);
      args.push_back(v);
    }
  }
  return args;
}

int run_cli(std::vector<std::string> argv);

int dispatch(const std::string& name, const CLI::App* sub, const Options& opt) {
  if (name == "rerun") {
    if (opt.manifest.empty()) throw ConfigError("rerun: --manifest is required");
    const auto m = read_json(opt.manifest);
    for (const auto& [path, hash] : m.at("inputs").items()) {
      const auto now = hex64(fnv1a64(read_text(path)));
      if (now != hash.get<std::string>()) throw ConfigError("rerun: input " + path + " changed since the run");
    }
    std::vector<std::string> args{"kanedge", m.at("command").get<std::string>()};
    for (const auto& a : m.at("args")) args.push_back(a.get<std::string>());
    args.push_back("--out");
    args.push_back(sub->get_option("--out")->count() ? opt.out : fs::path(opt.manifest).parent_path().string());
    return run_cli(args);
  }
  Run run(name, recorded_args(sub), opt);
  if (name == "gen-data") cmd_gen_data(run);
  else if (name == "fit") cmd_fit(run);
  else if (name == "quantize") cmd_quantize(run);
  else if (name == "sim") cmd_sim(run);
  else if (name == "sweep-inputgen") cmd_sweep_inputgen(run);
  else if (name == "map-compare") cmd_map_compare(run);
  else if (name == "cost") cmd_cost(run);
  else if (name == "search") cmd_search(run);
  run.finish();
  return kOk;
}

int run_cli(std::vector<std::string> argv) {
  CLI::App app{"KAN edge accelerator toolkit"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gen-data", "Generate the synthetic 17-feature, 14-class dataset"},
      {"fit", "Train a KAN on a dataset"},
      {"quantize", "Dump the shared hemi LUT and a quantized model report"},
      {"sim", "Accuracy of the analog pipeline under each row ordering"},
      {"sweep-inputgen", "Yield and cost of the input generator schemes"},
      {"map-compare", "Baseline vs sparsity-aware mapping across array sizes"},
      {"cost", "Lookup-path, encoder and accelerator cost tables"},
      {"search", "Constrained grid search with grid extension"},
      {"rerun", "Replay a run from its manifest"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    if (name == "rerun") {
      sub->add_option("--manifest", opt.manifest, "manifest.json of a previous run")->required();
      sub->add_option("--out", opt.out, "Output directory (default: the manifest's directory)");
      continue;
    }
    sub->add_option("--config", opt.config, "JSON config file");
    sub->add_option("--seed", opt.seed, "Top-level seed, overrides the config");
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
    sub->add_option("--format", opt.format, "Table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    if (name == "fit" || name == "sim" || name == "map-compare" || name == "search")
      sub->add_option("--data", opt.data, "Dataset CSV");
    if (name == "quantize" || name == "sim" || name == "cost") sub->add_option("--model", opt.model, "Model JSON");
  }
  std::vector<const char*> cargv;
  for (const auto& a : argv) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }
  for (const auto* sub : app.get_subcommands()) return dispatch(sub->get_name(), sub, opt);
  return kConfig;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(std::vector<std::string>(argv, argv + argc));
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ArgumentError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
