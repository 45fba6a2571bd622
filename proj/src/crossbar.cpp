#include "kanedge/crossbar.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kanedge/error.hpp"
#include "kanedge/json_util.hpp"

namespace kanedge {

ErrorTable::ErrorTable(std::map<int, ErrorStat> entries) : entries_(std::move(entries)) {
  for (const auto& [rows, s] : entries_) {
    if (rows < 1) throw ConfigError("error table: array size must be >= 1");
    if (!std::isfinite(s.gain) || !std::isfinite(s.sigma) || s.sigma < 0.0)
      throw ConfigError("error table: entry " + std::to_string(rows) +
                        " needs finite gain and sigma >= 0");
  }
}

ErrorStat ErrorTable::at(int rows) const {
  if (entries_.empty())
    throw ConfigError("error table is empty; supply measured or synthetic partial-sum statistics");
  auto hi = entries_.lower_bound(rows);
  if (hi != entries_.end() && hi->first == rows) return hi->second;
  if (hi == entries_.end() || hi == entries_.begin())
    throw ConfigError("error table has no entry bracketing array size " + std::to_string(rows) +
                      " (covers " + std::to_string(entries_.begin()->first) + ".." +
                      std::to_string(entries_.rbegin()->first) + ")");
  auto lo = std::prev(hi);
  const double f = static_cast<double>(rows - lo->first) / (hi->first - lo->first);
  return {lo->second.gain + f * (hi->second.gain - lo->second.gain),
          lo->second.sigma + f * (hi->second.sigma - lo->second.sigma)};
}

ErrorTable ErrorTable::synthetic_default() {
  return ErrorTable({{128, {1.0, 0.002}},
                     {256, {1.0, 0.003}},
                     {512, {1.0, 0.0045}},
                     {1024, {1.0, 0.0065}}});
}

ErrorTable error_table_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("error table: expected an object keyed by array size");
  std::map<int, ErrorStat> entries;
  for (const auto& [key, val] : j.items()) {
    if (!key.empty() && key[0] == '_') continue;  // comments / labels
    int rows = 0;
    try {
      std::size_t used = 0;
      rows = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw ConfigError("error table: key '" + key + "' is not an array size");
    }
    try {
      entries[rows] = {val.value("gain", 1.0), val.at("sigma").get<double>()};
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("error table entry " + key + ": " + e.what());
    }
  }
  if (entries.empty())
    throw ConfigError("error table is empty; supply measured or synthetic partial-sum statistics");
  return ErrorTable(std::move(entries));
}

nlohmann::json error_table_to_json(const ErrorTable& t) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [rows, s] : t.entries())
    j[std::to_string(rows)] = {{"gain", s.gain}, {"sigma", s.sigma}};
  return j;
}

ErrorTable load_error_table(const std::filesystem::path& path) {
  return error_table_from_json(read_json(path));
}

void CrossbarConfig::validate() const {
  if (rows < 1 || cols < 1) throw ConfigError("crossbar: rows and cols must be >= 1");
  if (!(g_unit > 0.0) || !std::isfinite(g_unit)) throw ConfigError("crossbar: g_unit must be > 0");
  if (!(r_wire >= 0.0) || !std::isfinite(r_wire))
    throw ConfigError("crossbar: r_wire must be >= 0 (a negative segment makes the ladder singular)");
  if (!(v_read > 0.0) || !std::isfinite(v_read)) throw ConfigError("crossbar: v_read must be > 0");
  if (adc_bits < 2 || adc_bits > 24) throw ConfigError("crossbar: adc_bits must lie in [2, 24]");
  if (max_input < 1) throw ConfigError("crossbar: max_input must be >= 1");
}

CrossbarConfig crossbar_config_from_json(const nlohmann::json& j) {
  CrossbarConfig c;
  try {
    c.rows = j.value("rows", c.rows);
    c.cols = j.value("cols", c.cols);
    c.g_unit = j.value("g_unit", c.g_unit);
    c.r_wire = j.value("r_wire", c.r_wire);
    c.v_read = j.value("v_read", c.v_read);
    c.adc_bits = j.value("adc_bits", c.adc_bits);
    c.max_input = j.value("max_input", c.max_input);
    c.seed = j.value("seed", c.seed);
    if (j.contains("error_table")) c.error_table = error_table_from_json(j.at("error_table"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("crossbar config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json crossbar_config_to_json(const CrossbarConfig& c) {
  nlohmann::json j = {{"rows", c.rows},     {"cols", c.cols},         {"g_unit", c.g_unit},
                      {"r_wire", c.r_wire}, {"v_read", c.v_read},     {"adc_bits", c.adc_bits},
                      {"max_input", c.max_input}, {"seed", c.seed}};
  if (c.error_table) j["error_table"] = error_table_to_json(*c.error_table);
  return j;
}

int ProgrammedArray::positive_cell(int position, int col) const {
  return std::max(0, weight(order_[position], col));
}

int ProgrammedArray::negative_cell(int position, int col) const {
  return std::max(0, -weight(order_[position], col));
}

double ProgrammedArray::conductance(int position, int col, bool negative,
                                    const CrossbarConfig& cfg) const {
  return (negative ? negative_cell(position, col) : positive_cell(position, col)) * cfg.g_unit;
}

double ProgrammedArray::full_scale(int col, std::uint32_t max_input) const {
  return std::max(col_pos_sum_[col], col_neg_sum_[col]) * max_input;
}

std::vector<int> identity_order(int rows) {
  std::vector<int> o(rows);
  for (int i = 0; i < rows; ++i) o[i] = i;
  return o;
}

ProgrammedArray program(std::span<const int> weights, std::span<const int> row_order,
                        const CrossbarConfig& cfg) {
  cfg.validate();
  const auto cells = static_cast<std::size_t>(cfg.rows) * cfg.cols;
  if (weights.size() != cells)
    throw ArgumentError("program: expected " + std::to_string(cells) + " weights, got " +
                        std::to_string(weights.size()));
  if (row_order.size() != static_cast<std::size_t>(cfg.rows))
    throw ArgumentError("program: row order length differs from rows");
  ProgrammedArray a;
  a.rows_ = cfg.rows;
  a.cols_ = cfg.cols;
  a.position_.assign(cfg.rows, -1);
  for (int p = 0; p < cfg.rows; ++p) {
    const int r = row_order[p];
    if (r < 0 || r >= cfg.rows || a.position_[r] != -1)
      throw ArgumentError("program: row order is not a permutation of [0, rows)");
    a.position_[r] = p;
  }
  a.order_.assign(row_order.begin(), row_order.end());
  a.weights_.assign(weights.begin(), weights.end());
  a.col_pos_sum_.assign(cfg.cols, 0.0);
  a.col_neg_sum_.assign(cfg.cols, 0.0);
  for (int r = 0; r < cfg.rows; ++r)
    for (int c = 0; c < cfg.cols; ++c) {
      const int w = a.weight(r, c);
      if (w < -127 || w > 127)
        throw ArgumentError("program: weight " + std::to_string(w) + " outside [-127, 127]");
      (w > 0 ? a.col_pos_sum_ : a.col_neg_sum_)[c] += std::abs(w);
    }
  // A full-scale cell's current carried over every segment must drop less
  // than the read voltage.
  const double bound = cfg.rho() * cfg.rows * 127.0;
  if (bound >= 1.0)
    throw ConfigError("program: r_wire too large (rows*r_wire*127*g_unit = " + std::to_string(bound) +
                      " must be < 1)");
  return a;
}

std::vector<long long> ideal_mac(const ProgrammedArray& a, std::span<const std::uint32_t> inputs) {
  if (inputs.size() != static_cast<std::size_t>(a.rows()))
    throw ArgumentError("ideal_mac: expected " + std::to_string(a.rows()) + " inputs");
  std::vector<long long> out(a.cols(), 0);
  for (int r = 0; r < a.rows(); ++r) {
    if (inputs[r] == 0) continue;
    for (int c = 0; c < a.cols(); ++c) out[c] += static_cast<long long>(a.weight(r, c)) * inputs[r];
  }
  return out;
}

int adc_quantize(double analog, double full_scale_current, int adc_bits) noexcept {
  const double steps = static_cast<double>((1 << (adc_bits - 1)) - 1);
  if (!(full_scale_current > 0.0)) return 0;
  return static_cast<int>(std::clamp(std::nearbyint(analog / full_scale_current * steps), -steps, steps));
}

namespace {

// Solves the node equations for positions 1..n-1 (node 0 is the clamp):
//   -v[p-1] + (2 + rho*g[p]) v[p] - v[p+1] = rho*g[p]*d[p], last row one neighbour only.
void solve_ladder(std::span<const double> g, std::span<const double> rhs, double rho,
                  std::vector<double>& v, std::vector<double>& scratch) {
  const std::size_t n = g.size();
  v.assign(n, 0.0);
  if (n < 2) return;
  scratch.assign(n, 0.0);
  // Forward sweep with sub/super diagonals fixed at -1.
  double prev_c = 0.0, prev_d = 0.0;
  for (std::size_t p = 1; p < n; ++p) {
    const double diag = (p + 1 < n ? 2.0 : 1.0) + rho * g[p];
    const double denom = diag + prev_c;  // diag - (-1)*c'
    const double c = -1.0 / denom;
    const double d = (rhs[p] + prev_d) / denom;
    scratch[p] = c;
    v[p] = d;
    prev_c = c;
    prev_d = d;
  }
  for (std::size_t p = n - 1; p-- > 1;) v[p] -= scratch[p] * v[p + 1];
}

}  // namespace

std::vector<double> ladder_voltages(std::span<const double> cell, std::span<const double> drive,
                                    double rho) {
  if (cell.size() != drive.size()) throw ArgumentError("ladder: cell/drive length mismatch");
  if (rho < 0.0) throw ConfigError("ladder: negative segment resistance");
  std::vector<double> rhs(cell.size());
  for (std::size_t p = 0; p < cell.size(); ++p) rhs[p] = rho * cell[p] * drive[p];
  std::vector<double> v, scratch;
  solve_ladder(cell, rhs, rho, v, scratch);
  return v;
}

double ladder_current(std::span<const double> cell, std::span<const double> drive, double rho) {
  const auto v = ladder_voltages(cell, drive, rho);
  double i = 0.0;
  for (std::size_t p = 0; p < cell.size(); ++p) i += cell[p] * (drive[p] - v[p]);
  return i;
}

MacResult ir_drop_mac(const ProgrammedArray& a, std::span<const std::uint32_t> inputs,
                      const CrossbarConfig& cfg) {
  cfg.validate();
  if (cfg.rows != a.rows() || cfg.cols != a.cols())
    throw ConfigError("ir_drop_mac: crossbar config shape differs from the programmed array");
  MacResult res;
  res.ideal = ideal_mac(a, inputs);
  const int rows = a.rows();
  std::vector<double> drive(rows), gp(rows), gn(rows);
  for (int p = 0; p < rows; ++p) {
    const auto in = inputs[a.row_order()[p]];
    if (in > cfg.max_input) throw ArgumentError("ir_drop_mac: input level exceeds max_input");
    drive[p] = in;
  }
  const double rho = cfg.rho();
  res.analog.resize(a.cols());
  res.adc_code.resize(a.cols());
  for (int c = 0; c < a.cols(); ++c) {
    for (int p = 0; p < rows; ++p) {
      gp[p] = a.positive_cell(p, c);
      gn[p] = a.negative_cell(p, c);
    }
    const double i = ladder_current(gp, drive, rho) - ladder_current(gn, drive, rho);
    res.analog[c] = i * cfg.current_scale();
    res.adc_code[c] =
        adc_quantize(res.analog[c], a.full_scale(c, cfg.max_input) * cfg.current_scale(), cfg.adc_bits);
  }
  return res;
}

IrDropModel::IrDropModel(const ProgrammedArray& a, const CrossbarConfig& cfg)
    : array_(&a), cfg_(cfg) {
  cfg.validate();
  if (cfg.rows != a.rows() || cfg.cols != a.cols())
    throw ConfigError("crossbar config shape differs from the programmed array");
  if (cfg.error_table) stat_ = cfg.error_table->at(cfg.rows);
  const int rows = a.rows();
  const double rho = cfg.rho();
  alpha_.assign(static_cast<std::size_t>(rows) * a.cols(), 0.0);
  full_scale_.resize(a.cols());
  std::vector<double> g(rows), v, scratch;
  for (int c = 0; c < a.cols(); ++c) {
    full_scale_[c] = a.full_scale(c, cfg.max_input);
    for (int half = 0; half < 2; ++half) {
      for (int p = 0; p < rows; ++p) g[p] = half ? a.negative_cell(p, c) : a.positive_cell(p, c);
      // alpha = g ∘ (1 - rho·A⁻¹g), A symmetric.
      solve_ladder(g, g, rho, v, scratch);
      const double sign = half ? -1.0 : 1.0;
      for (int p = 0; p < rows; ++p)
        alpha_[static_cast<std::size_t>(c) * rows + p] += sign * g[p] * (1.0 - rho * v[p]);
    }
  }
}

MacResult IrDropModel::mac(std::span<const std::uint32_t> inputs) const {
  const auto& a = *array_;
  MacResult res;
  res.ideal = ideal_mac(a, inputs);
  const int rows = a.rows();
  res.analog.assign(a.cols(), 0.0);
  res.adc_code.resize(a.cols());
  for (int p = 0; p < rows; ++p) {
    const auto in = inputs[a.row_order()[p]];
    if (in > cfg_.max_input) throw ArgumentError("mac: input level exceeds max_input");
    if (in == 0) continue;
    for (int c = 0; c < a.cols(); ++c)
      res.analog[c] += alpha_[static_cast<std::size_t>(c) * rows + p] * in;
  }
  for (int c = 0; c < a.cols(); ++c) {
    res.analog[c] *= cfg_.current_scale();
    res.adc_code[c] = adc_quantize(res.analog[c], full_scale_[c] * cfg_.current_scale(), cfg_.adc_bits);
  }
  return res;
}

MacResult IrDropModel::stochastic_mac(std::span<const std::uint32_t> inputs,
                                      std::mt19937_64& rng) const {
  if (!stat_)
    throw ConfigError(
        "stochastic MAC needs an error table; supply measured or synthetic partial-sum statistics");
  auto res = mac(inputs);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (int c = 0; c < array_->cols(); ++c) {
    const double fs = full_scale_[c] * cfg_.current_scale();
    res.analog[c] = stat_->gain * res.analog[c] + stat_->sigma * fs * unit(rng);
    res.adc_code[c] = adc_quantize(res.analog[c], fs, cfg_.adc_bits);
  }
  return res;
}

MacResult stochastic_mac(const ProgrammedArray& a, std::span<const std::uint32_t> inputs,
                         const CrossbarConfig& cfg, std::mt19937_64& rng) {
  if (!cfg.error_table || cfg.error_table->empty())
    throw ConfigError(
        "stochastic MAC needs an error table; supply measured or synthetic partial-sum statistics");
  const ErrorStat s = cfg.error_table->at(cfg.rows);
  auto res = ir_drop_mac(a, inputs, cfg);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (int c = 0; c < a.cols(); ++c) {
    const double fs = a.full_scale(c, cfg.max_input) * cfg.current_scale();
    res.analog[c] = s.gain * res.analog[c] + s.sigma * fs * unit(rng);
    res.adc_code[c] = adc_quantize(res.analog[c], fs, cfg.adc_bits);
  }
  return res;
}

std::string array_csv(const ProgrammedArray& a) {
  std::ostringstream os;
  os << "row,position";
  for (int c = 0; c < a.cols(); ++c) os << ",w" << c;
  os << '\n';
  for (int r = 0; r < a.rows(); ++r) {
    os << r << ',' << a.position_of(r);
    for (int c = 0; c < a.cols(); ++c) os << ',' << a.weight(r, c);
    os << '\n';
  }
  return os.str();
}

ProgrammedArray array_from_csv(const std::string& text, const CrossbarConfig& cfg) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("row,position", 0) != 0)
    throw ConfigError("array csv: missing 'row,position,...' header");
  std::vector<int> weights(static_cast<std::size_t>(cfg.rows) * cfg.cols, 0);
  std::vector<int> order(cfg.rows, -1);
  int seen = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<long> vals;
    while (std::getline(ls, cell, ',')) {
      try {
        vals.push_back(std::stol(cell));
      } catch (const std::exception&) {
        throw ConfigError("array csv: bad number '" + cell + "'");
      }
    }
    if (vals.size() != static_cast<std::size_t>(cfg.cols) + 2)
      throw ConfigError("array csv: row has " + std::to_string(vals.size()) + " fields");
    const long r = vals[0], p = vals[1];
    if (r < 0 || r >= cfg.rows || p < 0 || p >= cfg.rows)
      throw ConfigError("array csv: row/position out of range");
    order[p] = static_cast<int>(r);
    for (int c = 0; c < cfg.cols; ++c)
      weights[static_cast<std::size_t>(r) * cfg.cols + c] = static_cast<int>(vals[c + 2]);
    ++seen;
  }
  if (seen != cfg.rows) throw ConfigError("array csv: expected " + std::to_string(cfg.rows) + " rows");
  try {
    return program(weights, order, cfg);
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("array csv: ") + e.what());
  }
}

}  // namespace kanedge
