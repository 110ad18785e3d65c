#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "htmlphish/adam.hpp"
#include "htmlphish/training.hpp"
#include "support/toy_data.hpp"

using namespace htmlphish;
using namespace htmlphish::training;
using model::Variant;

namespace {

constexpr std::array<double, 3> kFractions = {0.8, 0.1, 0.1};

TrainConfig toy_config(Variant v, std::size_t epochs) {
  TrainConfig c;
  c.variant = v;
  c.epochs = epochs;
  c.seed = 17;
  c.learning_rate = 0.01;
  c.early_stop_patience.reset();
  return c;
}

}  // namespace

TEST_CASE("split sizes") {
  const auto ten = split_sizes(10, kFractions);
  CHECK(ten.train == 8);
  CHECK(ten.val == 1);
  CHECK(ten.test == 1);
  const auto full_scale = split_sizes(25300, kFractions);
  CHECK(full_scale.train == 20240);
  CHECK(full_scale.val == 2530);
  CHECK(full_scale.test == 2530);
  CHECK_THROWS_AS(split_sizes(5, kFractions), TrainingError);
}

TEST_CASE("split_indices partitions deterministically") {
  const auto a = split_indices(100, kFractions, 1);
  const auto b = split_indices(100, kFractions, 1);
  const auto c = split_indices(100, kFractions, 2);
  CHECK(a.train == b.train);
  CHECK(a.val == b.val);
  CHECK(a.test == b.test);
  CHECK(a.train != c.train);

  std::set<std::size_t> all;
  for (const auto* part : {&a.train, &a.val, &a.test}) all.insert(part->begin(), part->end());
  CHECK(all.size() == 100);
  CHECK(*all.rbegin() == 99);
}

TEST_CASE("split_dataset keeps each document in exactly one split") {
  std::vector<std::string> ids;
  for (int i = 0; i < 50; ++i) ids.push_back("doc-" + std::to_string(i));
  const auto s = split_dataset<std::string>(ids, kFractions, 5);
  std::multiset<std::string> seen;
  for (const auto* part : {&s.train, &s.val, &s.test}) seen.insert(part->begin(), part->end());
  CHECK(seen.size() == 50);
  CHECK(std::set<std::string>(seen.begin(), seen.end()).size() == 50);
}

TEST_CASE("shuffle_epoch permutes reproducibly") {
  std::vector<int> one = {42};
  nn::Rng rng(1);
  shuffle_epoch(std::span<int>(one), rng);
  CHECK(one == std::vector<int>{42});

  std::vector<int> a(30), b(30);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), 0);
  nn::Rng ra(9), rb(9);
  shuffle_epoch(std::span<int>(a), ra);
  shuffle_epoch(std::span<int>(b), rb);
  CHECK(a == b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expected(30);
  std::iota(expected.begin(), expected.end(), 0);
  CHECK(sorted == expected);
  CHECK(a != expected);
}

TEST_CASE("config validation") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), TrainingError);
  c = TrainConfig{};
  c.split_fractions = {0.8, 0.1, 0.2};
  CHECK_THROWS_AS(c.validate(), TrainingError);
  c = TrainConfig{};
  c.split_fractions = {0.9, 0.1, 0.0};
  CHECK_THROWS_AS(c.validate(), TrainingError);
  c = TrainConfig{};
  c.learning_rate = 0.0;
  CHECK_THROWS_AS(c.validate(), TrainingError);
}

TEST_CASE("zero epochs leave the model untouched") {
  const auto data = testing::toy_data(20, 1);
  nn::Rng rng(2);
  const auto initial = model::build_model(testing::toy_spec(data, Variant::Full), rng);
  const auto out = train(initial, toy_config(Variant::Full, 0), data.docs, {});
  CHECK(out.model == initial);
  CHECK(out.report.epochs.empty());
}

TEST_CASE("the toy separable corpus is learned within five epochs") {
  const auto data = testing::toy_data(200, 3);
  const auto split = split_dataset<tokenizer::EncodedDocument>(data.docs, kFractions, 4);
  for (auto variant : {Variant::Full, Variant::Word, Variant::Character}) {
    CAPTURE(variant);
    nn::Rng rng(5);
    auto initial = model::build_model(testing::toy_spec(data, variant), rng);
    const auto out = train(std::move(initial), toy_config(variant, 5), split.train, split.val);
    REQUIRE(out.report.epochs.size() == 5);
    CHECK(out.report.epochs.back().val_accuracy == 1.0);

    // Loss sanity: after epoch 1, any rise stays within 5%.
    for (std::size_t e = 2; e < out.report.epochs.size(); ++e) {
      CHECK(out.report.epochs[e].train_loss <= 1.05 * out.report.epochs[e - 1].train_loss);
    }
    CHECK(out.model.metadata.seed == 17);
    CHECK(out.model.metadata.epochs == 5);
  }
}

TEST_CASE("training is reproducible and independent of the thread count") {
  const auto data = testing::toy_data(60, 6);
  nn::Rng rng(7);
  const auto initial = model::build_model(testing::toy_spec(data, Variant::Full), rng);
  auto config = toy_config(Variant::Full, 3);
  config.batch_size = 7;
  config.threads = 1;
  const auto a = train(initial, config, data.docs, {});
  const auto b = train(initial, config, data.docs, {});
  config.threads = 4;
  const auto c = train(initial, config, data.docs, {});
  CHECK(a.model == b.model);
  CHECK(a.model == c.model);
  for (std::size_t e = 0; e < 3; ++e) {
    CHECK(a.report.epochs[e].train_loss == b.report.epochs[e].train_loss);
    CHECK(a.report.epochs[e].train_loss == c.report.epochs[e].train_loss);
  }
  CHECK_FALSE(a.model == initial);
}

TEST_CASE("a full-batch epoch equals one Adam step on the mean gradient") {
  const auto data = testing::toy_data(12, 8);
  auto spec = testing::toy_spec(data, Variant::Full);
  spec.dropout = 0.0;
  nn::Rng rng(9);
  const auto initial = model::build_model(spec, rng);

  auto config = toy_config(Variant::Full, 1);
  config.batch_size = data.docs.size();
  const auto trained = train(initial, config, data.docs, {}).model;

  // Oracle: mean of per-document dense gradients, then one optimizer step.
  auto expected = initial;
  auto mean = model::Gradients::zeros_like(initial);
  for (const auto& doc : data.docs) {
    const auto fwd = model::forward(initial, doc, nn::Mode::Infer, rng);
    const auto g = model::backward(initial, fwd.cache, doc.label);
    const auto src = g.tensors();
    const auto dst = mean.tensors();
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i]->add_scaled(*src[i], 1.0 / static_cast<double>(data.docs.size()));
    }
  }
  nn::AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  auto state = nn::AdamState::init(adam, expected.tensors());
  nn::adam_step(expected.tensors(), std::as_const(mean).tensors(), state);

  const auto got = trained.tensors();
  const auto want = expected.tensors();
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    for (std::size_t j = 0; j < got[i]->size(); ++j) {
      worst = std::max(worst, std::abs((*got[i])[j] - (*want[i])[j]));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("early stopping restores the best epoch") {
  const auto data = testing::toy_data(40, 10);
  const auto split = split_dataset<tokenizer::EncodedDocument>(data.docs, {0.5, 0.25, 0.25}, 11);
  nn::Rng rng(12);
  const auto initial = model::build_model(testing::toy_spec(data, Variant::Full), rng);
  auto config = toy_config(Variant::Full, 60);
  config.learning_rate = 0.05;
  config.early_stop_patience = 2;
  const auto out = train(initial, config, split.train, split.val);
  REQUIRE(out.report.best_epoch);
  const auto& best = out.report.epochs[*out.report.best_epoch - 1];
  for (const auto& e : out.report.epochs) CHECK(*best.val_loss <= *e.val_loss);
  CHECK(out.model.metadata.epochs == *out.report.best_epoch);
  CHECK(out.model.metadata.final_val_loss == *best.val_loss);
  if (out.report.early_stopped) {
    CHECK(out.report.epochs.size() == *out.report.best_epoch + 2);
  }
  CHECK(evaluate(out.model, split.val).loss == doctest::Approx(*best.val_loss).epsilon(1e-12));
}

TEST_CASE("training errors") {
  const auto data = testing::toy_data(10, 13);
  nn::Rng rng(14);
  auto params = model::build_model(testing::toy_spec(data, Variant::Full), rng);
  CHECK_THROWS_AS(train(params, toy_config(Variant::Full, 1), {}, {}), TrainingError);
  CHECK_THROWS_AS(train(params, toy_config(Variant::Word, 1), data.docs, {}), TrainingError);

  params.dense2_bias[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(train(params, toy_config(Variant::Full, 1), data.docs, {}),
                       doctest::Contains("epoch 1"), TrainingError);
}
