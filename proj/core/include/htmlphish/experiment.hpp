#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "htmlphish/corpus.hpp"
#include "htmlphish/metrics.hpp"
#include "htmlphish/model.hpp"
#include "htmlphish/tokenizer.hpp"
#include "htmlphish/training.hpp"

namespace htmlphish::experiment {

using model::Variant;

struct ExperimentConfig {
  // Variant and vocabulary sizes are filled in per run.
  model::ArchitectureSpec architecture;
  training::TrainConfig train;
  std::optional<std::size_t> word_vocab_cap;
  double threshold = 0.5;
};

// Seeded 80/10/10 cut of a corpus with vocabularies built from the training
// part only and every document encoded with them.
struct PreparedData {
  tokenizer::Vocabulary char_vocab{tokenizer::VocabKind::Character, {}};
  tokenizer::Vocabulary word_vocab{tokenizer::VocabKind::Word, {}};
  std::vector<tokenizer::EncodedDocument> train;
  std::vector<tokenizer::EncodedDocument> val;
  std::vector<tokenizer::EncodedDocument> test;
};

PreparedData prepare(const corpus::CorpusManifest& corpus, const ExperimentConfig& config);

// Scores `docs` in inference mode and times it.
metrics::EvalReport evaluate_model(const model::ModelParams& params,
                                   std::span<const tokenizer::EncodedDocument> docs,
                                   double threshold = 0.5, std::size_t threads = 0);

struct VariantOutcome {
  Variant variant = Variant::Full;
  model::ModelParams model;
  training::TrainReport training;
  metrics::EvalReport held_out;  // the test cut
  double training_cut_accuracy = 0.0;
  std::size_t parameters = 0;
};

VariantOutcome run_variant(const PreparedData& data, const ExperimentConfig& config,
                           Variant variant);

// Trains every listed variant on the same prepared split.
std::vector<VariantOutcome> compare_variants(
    const corpus::CorpusManifest& corpus, const ExperimentConfig& config,
    std::span<const Variant> variants = std::span<const Variant>());

std::vector<metrics::ComparisonRow> comparison_rows(std::span<const VariantOutcome> outcomes);

// Whether the full model leads on accuracy and AUC, phrased as a note.
std::string ordering_observation(std::span<const VariantOutcome> outcomes);

struct ResilienceOutcome {
  VariantOutcome trained;      // fitted and evaluated on the earlier corpus
  metrics::EvalReport later;   // the same model applied to the later corpus
  double accuracy_drop = 0.0;  // held-out accuracy minus later accuracy
};

// Trains on `earlier`, then scores `later` without retraining. Throws
// CorpusError if the two corpora share a document id.
ResilienceOutcome temporal_resilience(const corpus::CorpusManifest& earlier,
                                      const corpus::CorpusManifest& later,
                                      const ExperimentConfig& config, Variant variant);

}  // namespace htmlphish::experiment
