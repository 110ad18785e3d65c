#include "htmlphish/training.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "htmlphish/adam.hpp"

namespace htmlphish::training {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t resolve_threads(std::size_t requested, std::size_t work) {
  std::size_t n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, work));
}

// Runs fn(i) for i in [0, n) on up to `threads` workers and rethrows the
// first failure.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = resolve_threads(threads, n);
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr failure;
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < n && !failed; i = next++) fn(i);
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) throw TrainingError("batch size must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw TrainingError("learning rate must be positive");
  }
  double sum = 0.0;
  for (double f : split_fractions) {
    if (!(f > 0.0)) throw TrainingError("split fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw TrainingError("split fractions must sum to 1");
  if (early_stop_patience && *early_stop_patience == 0) {
    throw TrainingError("early-stopping patience must be at least 1 epoch");
  }
}

SplitSizes split_sizes(std::size_t n, const std::array<double, 3>& fractions) {
  // The epsilon absorbs representation error such as 0.1 * 10.
  const auto part = [n](double f) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * f + 1e-9));
  };
  SplitSizes s;
  s.val = part(fractions[1]);
  s.test = part(fractions[2]);
  if (s.val + s.test > n) throw TrainingError("split fractions exceed the dataset");
  s.train = n - s.val - s.test;
  if (s.train == 0 || s.val == 0 || s.test == 0) {
    throw TrainingError("too few documents (" + std::to_string(n) +
                        ") for a train/validation/test split");
  }
  return s;
}

IndexSplit split_indices(std::size_t n, const std::array<double, 3>& fractions,
                         std::uint64_t seed) {
  const SplitSizes sizes = split_sizes(n, fractions);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  nn::Rng rng(seed);
  shuffle_epoch(std::span<std::size_t>(order), rng);
  IndexSplit out;
  const auto begin = order.begin();
  out.train.assign(begin, begin + static_cast<std::ptrdiff_t>(sizes.train));
  out.val.assign(begin + static_cast<std::ptrdiff_t>(sizes.train),
                 begin + static_cast<std::ptrdiff_t>(sizes.train + sizes.val));
  out.test.assign(begin + static_cast<std::ptrdiff_t>(sizes.train + sizes.val), order.end());
  return out;
}

LossAccuracy evaluate(const ModelParams& params, std::span<const EncodedDocument> docs,
                      std::size_t threads) {
  if (docs.empty()) return {};
  const auto scores = model::predict_batch(params, docs, threads);
  double loss_sum = 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const int y = corpus::to_int(docs[i].label);
    const double p = scores[i];
    loss_sum += nn::bce_loss(p, y).loss;
    if ((p >= 0.5 ? 1 : 0) == y) ++correct;
  }
  const auto n = static_cast<double>(docs.size());
  return {loss_sum / n, static_cast<double>(correct) / n};
}

TrainResult train(ModelParams model, const TrainConfig& config,
                  std::span<const EncodedDocument> train_docs,
                  std::span<const EncodedDocument> val_docs, const EpochCallback& on_epoch) {
  config.validate();
  if (config.variant != model.spec.variant) {
    throw TrainingError("configuration asks for the " + std::string(model::to_string(config.variant)) +
                        " variant but the model is " + std::string(model::to_string(model.spec.variant)));
  }
  TrainResult result{std::move(model), {}};
  ModelParams& params = result.model;
  TrainReport& report = result.report;
  if (config.epochs == 0) return result;
  if (train_docs.empty()) throw TrainingError("training split is empty");

  const auto run_start = Clock::now();
  nn::AdamConfig adam_config;
  adam_config.learning_rate = config.learning_rate;
  nn::AdamState adam = nn::AdamState::init(adam_config, params.tensors());
  model::Gradients grads = model::Gradients::zeros_like(params);

  const nn::Rng root(config.seed);
  std::optional<ModelParams> best;
  std::optional<double> best_val;
  std::size_t stale_epochs = 0;

  std::vector<std::size_t> order(train_docs.size());
  std::vector<model::DocumentGradients> doc_grads(std::min(config.batch_size, train_docs.size()));
  std::vector<double> doc_loss(doc_grads.size());

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto epoch_start = Clock::now();
    const nn::Rng epoch_root = root.fork(epoch);
    nn::Rng shuffle_rng = epoch_root.fork(0);
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle_epoch(std::span<std::size_t>(order), shuffle_rng);

    double loss_sum = 0.0;
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_no) {
      const std::size_t count = std::min(config.batch_size, order.size() - start);
      parallel_for(count, config.threads, [&](std::size_t k) {
        const std::size_t pos = start + k;
        nn::Rng dropout_rng = epoch_root.fork(pos + 1);
        const auto& doc = train_docs[order[pos]];
        auto fwd = model::forward(params, doc, nn::Mode::Train, dropout_rng);
        doc_loss[k] = model::loss(fwd.cache, doc.label);
        doc_grads[k] = model::backward_document(params, fwd.cache, doc.label);
      });

      // Fixed-order reduction keeps results independent of thread count.
      for (nn::Tensor* g : grads.tensors()) g->fill(0.0);
      const double scale = 1.0 / static_cast<double>(count);
      for (std::size_t k = 0; k < count; ++k) {
        if (!std::isfinite(doc_loss[k])) {
          throw TrainingError("non-finite loss in epoch " + std::to_string(epoch) + ", batch " +
                              std::to_string(batch_no + 1) + " (training document " +
                              std::to_string(order[start + k]) + ")");
        }
        loss_sum += doc_loss[k];
        model::accumulate(grads, doc_grads[k], scale);
      }
      nn::adam_step(params.tensors(), std::as_const(grads).tensors(), adam);
      ++params.revision;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(order.size());
    if (!val_docs.empty()) {
      const auto v = evaluate(params, val_docs, config.threads);
      stats.val_loss = v.loss;
      stats.val_accuracy = v.accuracy;
    }
    stats.seconds = seconds_since(epoch_start);
    report.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);

    if (stats.val_loss) {
      if (!best_val || *stats.val_loss < *best_val) {
        best_val = stats.val_loss;
        report.best_epoch = epoch;
        stale_epochs = 0;
        if (config.early_stop_patience) best = params;
      } else if (config.early_stop_patience && ++stale_epochs >= *config.early_stop_patience) {
        report.early_stopped = true;
        break;
      }
    }
  }

  const EpochStats* chosen = &report.epochs.back();
  if (best) {
    params = std::move(*best);
    ++params.revision;
    chosen = &report.epochs[*report.best_epoch - 1];
  }
  params.metadata.seed = config.seed;
  params.metadata.epochs = chosen->epoch;
  params.metadata.final_train_loss = chosen->train_loss;
  params.metadata.final_val_loss = chosen->val_loss.value_or(0.0);
  report.total_seconds = seconds_since(run_start);
  return result;
}

}  // namespace htmlphish::training
