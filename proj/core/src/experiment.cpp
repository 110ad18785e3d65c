#include "htmlphish/experiment.hpp"

#include <chrono>

namespace htmlphish::experiment {
namespace {

constexpr Variant kAllVariants[] = {Variant::Full, Variant::Word, Variant::Character};

std::vector<int> labels_of(std::span<const tokenizer::EncodedDocument> docs) {
  std::vector<int> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(corpus::to_int(d.label));
  return out;
}

std::optional<double> auc_of(const metrics::EvalReport& r) {
  return r.roc ? std::optional<double>(r.roc->auc) : std::nullopt;
}

}  // namespace

PreparedData prepare(const corpus::CorpusManifest& corpus, const ExperimentConfig& config) {
  const auto& records = corpus.records();
  const auto split = training::split_indices(records.size(), config.train.split_fractions,
                                             config.train.seed);
  std::vector<std::string_view> train_html;
  train_html.reserve(split.train.size());
  for (auto i : split.train) train_html.emplace_back(records[i].html());

  PreparedData data;
  data.char_vocab = tokenizer::build_vocab(train_html, tokenizer::VocabKind::Character);
  data.word_vocab =
      tokenizer::build_vocab(train_html, tokenizer::VocabKind::Word, config.word_vocab_cap);

  const tokenizer::Encoder encoder(
      &data.char_vocab, &data.word_vocab,
      {config.architecture.char_maxlen, config.architecture.word_maxlen});
  auto encode_all = [&](const std::vector<std::size_t>& idx) {
    std::vector<tokenizer::EncodedDocument> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(encoder.encode(records[i].html(), records[i].label()));
    return out;
  };
  data.train = encode_all(split.train);
  data.val = encode_all(split.val);
  data.test = encode_all(split.test);
  return data;
}

metrics::EvalReport evaluate_model(const model::ModelParams& params,
                                   std::span<const tokenizer::EncodedDocument> docs,
                                   double threshold, std::size_t threads) {
  const auto start = std::chrono::steady_clock::now();
  const auto scores = model::predict_batch(params, docs, threads);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto labels = labels_of(docs);
  auto report = metrics::evaluate(scores, labels, threshold);
  report.timing.total_seconds = seconds;
  report.timing.per_document_seconds = docs.empty() ? 0.0 : seconds / static_cast<double>(docs.size());
  return report;
}

VariantOutcome run_variant(const PreparedData& data, const ExperimentConfig& config,
                           Variant variant) {
  model::ArchitectureSpec spec = config.architecture;
  spec.variant = variant;
  spec.char_vocab_size = data.char_vocab.size();
  spec.word_vocab_size = data.word_vocab.size();

  training::TrainConfig train_config = config.train;
  train_config.variant = variant;

  nn::Rng init_rng(config.train.seed);
  auto trained = training::train(model::build_model(spec, init_rng), train_config, data.train,
                                 data.val);

  VariantOutcome out;
  out.variant = variant;
  out.parameters = model::parameter_count(trained.model.spec);
  out.held_out = evaluate_model(trained.model, data.test, config.threshold, config.train.threads);
  out.training_cut_accuracy =
      training::evaluate(trained.model, data.train, config.train.threads).accuracy;
  out.model = std::move(trained.model);
  out.training = std::move(trained.report);
  return out;
}

std::vector<VariantOutcome> compare_variants(const corpus::CorpusManifest& corpus,
                                             const ExperimentConfig& config,
                                             std::span<const Variant> variants) {
  if (variants.empty()) variants = kAllVariants;
  const PreparedData data = prepare(corpus, config);
  std::vector<VariantOutcome> out;
  for (Variant v : variants) out.push_back(run_variant(data, config, v));
  return out;
}

std::vector<metrics::ComparisonRow> comparison_rows(std::span<const VariantOutcome> outcomes) {
  std::vector<metrics::ComparisonRow> rows;
  for (const auto& o : outcomes) {
    const auto& m = o.held_out.metrics;
    rows.push_back({model::display_name(o.variant), m.accuracy, m.precision, m.tpr, m.f1,
                    auc_of(o.held_out), metrics::format_duration(o.training.total_seconds)});
  }
  return rows;
}

std::string ordering_observation(std::span<const VariantOutcome> outcomes) {
  const VariantOutcome* full = nullptr;
  for (const auto& o : outcomes) {
    if (o.variant == Variant::Full) full = &o;
  }
  if (!full || outcomes.size() < 2) return "full variant not compared against a baseline";
  bool leads_acc = true;
  bool leads_auc = true;
  const double acc = full->held_out.metrics.accuracy.value_or(0.0);
  for (const auto& o : outcomes) {
    if (&o == full) continue;
    leads_acc = leads_acc && acc >= o.held_out.metrics.accuracy.value_or(0.0);
    leads_auc = leads_auc && auc_of(full->held_out).value_or(0.0) >= auc_of(o.held_out).value_or(0.0);
  }
  std::string note = model::display_name(Variant::Full);
  if (leads_acc && leads_auc) return note + " matches or exceeds every baseline on accuracy and AUC";
  if (leads_acc) return note + " leads on accuracy but not on AUC";
  if (leads_auc) return note + " leads on AUC but not on accuracy";
  return note + " does not lead on accuracy or AUC";
}

ResilienceOutcome temporal_resilience(const corpus::CorpusManifest& earlier,
                                      const corpus::CorpusManifest& later,
                                      const ExperimentConfig& config, Variant variant) {
  const auto shared = corpus::overlapping_ids(earlier, later);
  if (!shared.empty()) {
    throw CorpusError("training and later corpora share " + std::to_string(shared.size()) +
                      " document id(s), e.g. '" + shared.front() + "'");
  }
  const PreparedData data = prepare(earlier, config);
  ResilienceOutcome out;
  out.trained = run_variant(data, config, variant);

  const tokenizer::Encoder encoder(
      &data.char_vocab, &data.word_vocab,
      {config.architecture.char_maxlen, config.architecture.word_maxlen});
  std::vector<tokenizer::EncodedDocument> docs;
  docs.reserve(later.size());
  for (const auto& r : later.records()) docs.push_back(encoder.encode(r.html(), r.label()));
  out.later = evaluate_model(out.trained.model, docs, config.threshold, config.train.threads);
  out.accuracy_drop = out.trained.held_out.metrics.accuracy.value_or(0.0) -
                      out.later.metrics.accuracy.value_or(0.0);
  return out;
}

}  // namespace htmlphish::experiment
