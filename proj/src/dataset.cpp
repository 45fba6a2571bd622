#include "kanedge/dataset.hpp"

#include <algorithm>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>

#include "kanedge/error.hpp"
#include "kanedge/json_util.hpp"
#include "kanedge/kan.hpp"
#include "kanedge/train.hpp"

namespace kanedge {

void Dataset::add(std::span<const double> x, std::span<const double> y) {
  if (n_features == 0 && n_outputs == 0) {
    n_features = static_cast<int>(x.size());
    n_outputs = static_cast<int>(y.size());
  }
  if (static_cast<int>(x.size()) != n_features ||
      static_cast<int>(y.size()) != n_outputs)
    throw ArgumentError("Dataset::add: row shape mismatch");
  features.insert(features.end(), x.begin(), x.end());
  targets.insert(targets.end(), y.begin(), y.end());
}

void Dataset::add_labeled(std::span<const double> x, int label) {
  if (label < 0 || label >= n_outputs)
    throw ArgumentError("Dataset::add_labeled: label out of range");
  std::vector<double> onehot(n_outputs, 0.0);
  onehot[label] = 1.0;
  add(x, onehot);
  labels.push_back(label);
}

void Dataset::validate() const {
  if (n_features < 1 || n_outputs < 1)
    throw ArgumentError("dataset: needs at least one feature and one output");
  if (features.size() % n_features != 0 ||
      targets.size() != size() * n_outputs)
    throw ArgumentError("dataset: ragged feature/target tables");
  if (!labels.empty() && labels.size() != size())
    throw ArgumentError("dataset: label count does not match rows");
}

Dataset make_surrogate(const SurrogateSpec& spec) {
  const SplineGrid teacher_grid(4, 3, -1.0, 1.0);
  const int widths[] = {spec.n_features, spec.n_classes};
  const KanNetwork teacher =
      random_network(widths, teacher_grid, 1.0, spec.teacher_seed);

  std::mt19937_64 rng(spec.sample_seed);
  std::normal_distribution<double> feature(0.0, spec.input_sigma);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> any_class(0, spec.n_classes - 1);

  Dataset data;
  data.n_features = spec.n_features;
  data.n_outputs = spec.n_classes;
  std::vector<double> x(spec.n_features);
  for (std::size_t s = 0; s < spec.samples; ++s) {
    for (auto& v : x) v = std::clamp(feature(rng), -1.0, 1.0);
    const auto logits = network_forward(teacher, x);
    int label = static_cast<int>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
    if (coin(rng) < spec.label_noise) label = any_class(rng);
    data.add_labeled(x, label);
  }
  return data;
}

std::pair<Dataset, Dataset> split(const Dataset& data, std::size_t first_count) {
  first_count = std::min(first_count, data.size());
  Dataset a, b;
  a.n_features = b.n_features = data.n_features;
  a.n_outputs = b.n_outputs = data.n_outputs;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Dataset& dst = i < first_count ? a : b;
    if (data.is_classification())
      dst.add_labeled(data.x(i), data.labels[i]);
    else
      dst.add(data.x(i), data.y(i));
  }
  return {std::move(a), std::move(b)};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
      cell.pop_back();
    cells.push_back(cell);
  }
  return cells;
}

}  // namespace

Dataset parse_dataset_csv(const std::string& text, const std::string& name, int n_classes) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("dataset " + name + " is empty");
  const auto header = split_csv_line(line);
  const auto label_col = std::find(header.begin(), header.end(), "label");
  const bool labelled = label_col != header.end();

  std::vector<int> feature_cols, target_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (labelled && header[c] == "label") continue;
    if (!labelled && !header[c].empty() && header[c][0] == 'y')
      target_cols.push_back(static_cast<int>(c));
    else
      feature_cols.push_back(static_cast<int>(c));
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  int max_label = -1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ConfigError(name + ":" + std::to_string(line_no) +
                        ": expected " + std::to_string(header.size()) +
                        " columns");
    std::vector<double> values(cells.size());
    try {
      for (std::size_t c = 0; c < cells.size(); ++c) values[c] = std::stod(cells[c]);
    } catch (const std::exception&) {
      throw ConfigError(name + ":" + std::to_string(line_no) +
                        ": non-numeric cell");
    }
    if (labelled) {
      const int label = static_cast<int>(values[label_col - header.begin()]);
      labels.push_back(label);
      max_label = std::max(max_label, label);
    }
    rows.push_back(std::move(values));
  }

  Dataset data;
  data.n_features = static_cast<int>(feature_cols.size());
  if (labelled && n_classes > 0 && max_label >= n_classes)
    throw ConfigError(name + ": label " + std::to_string(max_label) +
                      " exceeds class count " + std::to_string(n_classes));
  data.n_outputs = labelled ? (n_classes > 0 ? n_classes : max_label + 1)
                            : static_cast<int>(target_cols.size());
  std::vector<double> x(feature_cols.size()), y(target_cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < feature_cols.size(); ++c) x[c] = rows[r][feature_cols[c]];
    if (labelled) {
      data.add_labeled(x, labels[r]);
    } else {
      for (std::size_t c = 0; c < target_cols.size(); ++c) y[c] = rows[r][target_cols[c]];
      data.add(x, y);
    }
  }
  data.validate();
  return data;
}

Dataset load_dataset_csv(const std::filesystem::path& path, int n_classes) {
  return parse_dataset_csv(read_text(path), path.string(), n_classes);
}

std::string dataset_csv(const Dataset& data) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (int f = 0; f < data.n_features; ++f) out << (f ? "," : "") << 'x' << f;
  if (data.is_classification()) {
    out << ",label\n";
  } else {
    for (int o = 0; o < data.n_outputs; ++o) out << ",y" << o;
    out << '\n';
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.x(i);
    for (int f = 0; f < data.n_features; ++f) out << (f ? "," : "") << x[f];
    if (data.is_classification()) {
      out << ',' << data.labels[i];
    } else {
      for (double v : data.y(i)) out << ',' << v;
    }
    out << '\n';
  }
  return out.str();
}

void save_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  write_text_atomic(path, dataset_csv(data));
}

}  // namespace kanedge
