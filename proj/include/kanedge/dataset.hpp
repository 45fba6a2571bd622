#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace kanedge {

// Row-major feature/target table. Classification sets carry labels and
// one-hot targets; regression sets leave labels empty.
struct Dataset {
  int n_features = 0;
  int n_outputs = 0;
  std::vector<double> features;
  std::vector<double> targets;
  std::vector<int> labels;

  std::size_t size() const noexcept {
    return n_features ? features.size() / n_features : 0;
  }
  bool is_classification() const noexcept { return !labels.empty(); }
  std::span<const double> x(std::size_t i) const {
    return {features.data() + i * n_features, static_cast<std::size_t>(n_features)};
  }
  std::span<const double> y(std::size_t i) const {
    return {targets.data() + i * n_outputs, static_cast<std::size_t>(n_outputs)};
  }

  void add(std::span<const double> x, std::span<const double> y);
  void add_labeled(std::span<const double> x, int label);
  // Throws ArgumentError on inconsistent shapes.
  void validate() const;
};

struct SurrogateSpec {
  int n_features = 17;
  int n_classes = 14;
  std::size_t samples = 3000;
  double input_sigma = 0.35;  // features ~ N(0, sigma), clipped to [-1, 1]
  double label_noise = 0.05;  // probability a label is replaced at random
  std::uint64_t teacher_seed = 20240517;
  std::uint64_t sample_seed = 1;
};

// Synthetic 17-feature, 14-class task labelled by a fixed random KAN teacher.
Dataset make_surrogate(const SurrogateSpec& spec);

// Deterministic split: first `first_count` rows, then the rest.
std::pair<Dataset, Dataset> split(const Dataset& data, std::size_t first_count);

// CSV with header. Columns named "label" mark a classification set, every
// other column before it is a feature; regression files name targets y0..yN.
// n_classes > 0 fixes the one-hot width; otherwise it is max label + 1.
Dataset parse_dataset_csv(const std::string& text, const std::string& name, int n_classes = 0);
Dataset load_dataset_csv(const std::filesystem::path& path, int n_classes = 0);
std::string dataset_csv(const Dataset& data);
void save_dataset_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace kanedge
