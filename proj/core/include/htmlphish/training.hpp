#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "htmlphish/error.hpp"
#include "htmlphish/model.hpp"
#include "htmlphish/rng.hpp"

namespace htmlphish::training {

using model::ModelParams;
using model::Variant;
using tokenizer::EncodedDocument;

struct TrainConfig {
  Variant variant = Variant::Full;
  std::size_t batch_size = 20;
  double learning_rate = 0.0015;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  std::array<double, 3> split_fractions{0.8, 0.1, 0.1};  // train, validation, test
  std::optional<std::size_t> early_stop_patience = 3;
  // Worker threads for per-document forward/backward; 0 means one per core.
  // Results do not depend on this value.
  std::size_t threads = 0;

  void validate() const;  // throws TrainingError
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  std::optional<double> val_loss;
  std::optional<double> val_accuracy;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  std::optional<std::size_t> best_epoch;
  bool early_stopped = false;
  double total_seconds = 0.0;
  std::string final_model_path;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

// floor(n * fraction) for validation and test, remainder to training.
// Throws TrainingError when any part would be empty.
SplitSizes split_sizes(std::size_t n, const std::array<double, 3>& fractions);

struct IndexSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

// Seeded shuffle of 0..n-1 followed by contiguous cuts.
IndexSplit split_indices(std::size_t n, const std::array<double, 3>& fractions,
                         std::uint64_t seed);

// Fisher-Yates.
template <typename T>
void shuffle_epoch(std::span<T> items, nn::Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

template <typename T>
struct DatasetSplit {
  std::vector<T> train;
  std::vector<T> val;
  std::vector<T> test;
};

template <typename T>
DatasetSplit<T> split_dataset(std::span<const T> items, const std::array<double, 3>& fractions,
                              std::uint64_t seed) {
  const IndexSplit idx = split_indices(items.size(), fractions, seed);
  DatasetSplit<T> out;
  for (auto i : idx.train) out.train.push_back(items[i]);
  for (auto i : idx.val) out.val.push_back(items[i]);
  for (auto i : idx.test) out.test.push_back(items[i]);
  return out;
}

struct LossAccuracy {
  double loss = 0.0;
  double accuracy = 0.0;
};

// Mean BCE and accuracy at threshold 0.5 in inference mode.
LossAccuracy evaluate(const ModelParams& params, std::span<const EncodedDocument> docs,
                      std::size_t threads = 0);

struct TrainResult {
  ModelParams model;
  TrainReport report;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Mini-batch Adam on the mean batch loss. Partial final batches are kept.
// With early stopping, training halts after `patience` epochs without a
// lower validation loss and the best-epoch parameters are returned.
// Throws TrainingError for an empty training set or a non-finite loss.
TrainResult train(ModelParams model, const TrainConfig& config,
                  std::span<const EncodedDocument> train_docs,
                  std::span<const EncodedDocument> val_docs, const EpochCallback& on_epoch = {});

}  // namespace htmlphish::training
