#pragma once

#include <cstdint>
#include <vector>

#include "kanedge/dataset.hpp"
#include "kanedge/kan.hpp"

namespace kanedge {

enum class Loss { SquaredError, CrossEntropy };

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 10;
  int batch_size = 32;
  std::uint64_t seed = 0;
  Loss loss = Loss::SquaredError;

  void validate() const;
};

struct TrainResult {
  KanNetwork net;
  double initial_train_loss = 0.0;
  double initial_val_loss = 0.0;
  std::vector<double> train_loss;  // after each epoch
  std::vector<double> val_loss;    // after each epoch
};

// Mean loss over the set. Squared error is averaged over outputs, cross
// entropy uses softmax over outputs against the label.
double evaluate_loss(const KanNetwork& net, const Dataset& data, Loss loss);
double accuracy(const KanNetwork& net, const Dataset& data);

// Mini-batch SGD with a fixed learning rate; shuffling is driven by cfg.seed.
// An empty validation set reports the training loss in its place.
// Throws TrainingDivergedError if any loss becomes non-finite.
TrainResult train(const KanNetwork& net, const Dataset& train_set,
                  const Dataset& val_set, const TrainConfig& cfg);

// Gradient of the mean loss over the listed rows of `data`.
std::vector<LayerGradients> network_gradients(const KanNetwork& net,
                                              const Dataset& data,
                                              std::span<const std::size_t> rows,
                                              Loss loss);

KanNetwork random_network(std::span<const int> widths, const SplineGrid& grid,
                          double scale, std::uint64_t seed);

}  // namespace kanedge
