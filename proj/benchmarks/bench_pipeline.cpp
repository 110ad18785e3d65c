#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "htmlphish/metrics.hpp"
#include "htmlphish/model.hpp"
#include "htmlphish/synthetic.hpp"
#include "htmlphish/tokenizer.hpp"

namespace {

using namespace htmlphish;

std::string sample_page() {
  std::string html;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    html += synthetic::page(seed % 2 ? corpus::Label::Phishing : corpus::Label::Legitimate, seed);
  }
  return html;
}

void BM_TokenizeWords(benchmark::State& state) {
  const auto html = sample_page();
  for (auto _ : state) benchmark::DoNotOptimize(tokenizer::tokenize_words(html));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(html.size()));
}
BENCHMARK(BM_TokenizeWords);

void BM_Encode(benchmark::State& state) {
  const auto html = sample_page();
  const std::vector<std::string_view> docs = {html};
  const auto chars = tokenizer::build_vocab(docs, tokenizer::VocabKind::Character);
  const auto words = tokenizer::build_vocab(docs, tokenizer::VocabKind::Word);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tokenizer::encode(html, corpus::Label::Legitimate, chars, words));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(html.size()));
}
BENCHMARK(BM_Encode);

// One document through the full-scale architecture with a small vocabulary.
void BM_PredictPublishedShape(benchmark::State& state) {
  model::ArchitectureSpec spec;
  spec.char_vocab_size = 167;
  spec.word_vocab_size = 5000;
  nn::Rng rng(3);
  const auto params = model::build_model(spec, rng);
  tokenizer::EncodedDocument doc;
  doc.char_ids.assign(spec.char_maxlen, 0);
  doc.word_ids.assign(spec.word_maxlen, 0);
  for (std::size_t i = 0; i < doc.char_ids.size(); ++i) doc.char_ids[i] = 2 + rng.below(165);
  for (std::size_t i = 0; i < doc.word_ids.size(); ++i) doc.word_ids[i] = 2 + rng.below(4998);
  for (auto _ : state) benchmark::DoNotOptimize(model::predict(params, doc));
}
BENCHMARK(BM_PredictPublishedShape)->Unit(benchmark::kMillisecond);

void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  nn::Rng rng(4);
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.uniform();
    labels[i] = static_cast<int>(rng.below(2));
  }
  for (auto _ : state) benchmark::DoNotOptimize(metrics::roc_auc(scores, labels));
  state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_RocAuc)->RangeMultiplier(10)->Range(100, 100000)->Complexity(benchmark::oNLogN);

}  // namespace
