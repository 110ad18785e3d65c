#include "htmlphish/model.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <thread>

namespace htmlphish::model {
namespace {

void fill_uniform(Tensor& t, Rng rng, double limit) {
  for (double& x : t.data()) x = rng.uniform(-limit, limit);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ModelError("invalid architecture: " + message);
}

Tensor embed_document(const ModelParams& params, const EncodedDocument& doc) {
  const auto& spec = params.spec;
  if (spec.uses_chars() && doc.char_ids.size() != spec.char_maxlen) {
    throw ModelError("character stream has length " + std::to_string(doc.char_ids.size()) +
                     ", model expects " + std::to_string(spec.char_maxlen));
  }
  if (spec.uses_words() && doc.word_ids.size() != spec.word_maxlen) {
    throw ModelError("word stream has length " + std::to_string(doc.word_ids.size()) +
                     ", model expects " + std::to_string(spec.word_maxlen));
  }
  const std::size_t d = spec.embedding_dim;
  Tensor x({spec.sequence_length(), d});
  std::size_t row = 0;
  auto gather = [&](std::span<const std::uint32_t> ids, const Tensor& table) {
    for (auto id : ids) {
      if (id >= table.dim(0)) {
        throw ModelError("token index " + std::to_string(id) + " outside vocabulary of " +
                         std::to_string(table.dim(0)));
      }
      std::copy_n(table.row(id).data(), d, x.row(row++).data());
    }
  };
  if (spec.uses_chars()) gather(doc.char_ids, *params.char_embedding);
  if (spec.uses_words()) gather(doc.word_ids, *params.word_embedding);
  return x;
}

double to_probability(double logit) {
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(nn::sigmoid(logit), lo, hi);
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Character: return "character";
    case Variant::Word: return "word";
    case Variant::Full: return "full";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "character" || name == "char") return Variant::Character;
  if (name == "word") return Variant::Word;
  if (name == "full") return Variant::Full;
  throw ModelError("unknown variant '" + std::string(name) + "' (expected character, word or full)");
}

std::string display_name(Variant v) {
  switch (v) {
    case Variant::Character: return "HTMLPhish-Character";
    case Variant::Word: return "HTMLPhish-Word";
    case Variant::Full: return "HTMLPhish-Full";
  }
  return "HTMLPhish";
}

void ArchitectureSpec::validate() const {
  require(variant == Variant::Character || variant == Variant::Word || variant == Variant::Full,
          "unknown variant");
  require(embedding_dim >= 1, "embedding dimension must be positive");
  require(filters >= 1, "filter count must be positive");
  require(kernel >= 1, "kernel size must be positive");
  require(pool >= 1, "pool size must be positive");
  require(dense_units >= 1, "dense layer needs at least one unit");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
  constexpr auto kMaxVocab = std::size_t{std::numeric_limits<std::uint32_t>::max()};
  if (uses_chars()) {
    require(char_vocab_size >= 1 && char_vocab_size <= kMaxVocab, "character vocabulary size");
  }
  if (uses_words()) {
    require(word_vocab_size >= 1 && word_vocab_size <= kMaxVocab, "word vocabulary size");
  }
  if (variant == Variant::Character) require(char_maxlen >= 1, "character maxlen must be positive");
  if (variant == Variant::Word) require(word_maxlen >= 1, "word maxlen must be positive");
  require(sequence_length() >= kernel, "sequence of " + std::to_string(sequence_length()) +
                                           " rows is shorter than the kernel");
  require(conv_length() >= pool, "convolution output shorter than the pool size");
}

ArchitectureSpec ArchitectureSpec::normalized() const {
  ArchitectureSpec s = *this;
  if (!uses_chars()) {
    s.char_vocab_size = 0;
    s.char_maxlen = 0;
  }
  if (!uses_words()) {
    s.word_vocab_size = 0;
    s.word_maxlen = 0;
  }
  return s;
}

std::size_t parameter_count(const ArchitectureSpec& spec) {
  const std::size_t d = spec.embedding_dim;
  std::size_t count = 0;
  if (spec.uses_chars()) count += spec.char_vocab_size * d;
  if (spec.uses_words()) count += spec.word_vocab_size * d;
  count += spec.filters * spec.kernel * d + spec.filters;
  count += spec.flatten_size() * spec.dense_units + spec.dense_units;
  count += spec.dense_units + 1;
  return count;
}

std::vector<Tensor*> ModelParams::tensors() {
  std::vector<Tensor*> out;
  if (char_embedding) out.push_back(&*char_embedding);
  if (word_embedding) out.push_back(&*word_embedding);
  for (Tensor* t : {&conv_filters, &conv_bias, &dense1_weights, &dense1_bias, &dense2_weights,
                    &dense2_bias}) {
    out.push_back(t);
  }
  return out;
}

std::vector<const Tensor*> ModelParams::tensors() const {
  auto mut = const_cast<ModelParams*>(this)->tensors();
  return {mut.begin(), mut.end()};
}

std::vector<std::string> ModelParams::tensor_names() const {
  std::vector<std::string> names;
  if (char_embedding) names.emplace_back("char_embedding");
  if (word_embedding) names.emplace_back("word_embedding");
  for (const char* n : {"conv_filters", "conv_bias", "dense1_weights", "dense1_bias",
                        "dense2_weights", "dense2_bias"}) {
    names.emplace_back(n);
  }
  return names;
}

std::size_t ModelParams::allocated_count() const {
  std::size_t n = 0;
  for (const Tensor* t : tensors()) n += t->size();
  return n;
}

bool operator==(const ModelParams& a, const ModelParams& b) {
  const auto bits = [](double x) { return std::bit_cast<std::uint64_t>(x); };
  if (!(a.spec == b.spec) || a.metadata.seed != b.metadata.seed ||
      a.metadata.epochs != b.metadata.epochs ||
      bits(a.metadata.final_train_loss) != bits(b.metadata.final_train_loss) ||
      bits(a.metadata.final_val_loss) != bits(b.metadata.final_val_loss)) {
    return false;
  }
  const auto ta = a.tensors();
  const auto tb = b.tensors();
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (!(*ta[i] == *tb[i])) return false;
  }
  return true;
}

ModelParams build_model(const ArchitectureSpec& requested, Rng& rng) {
  requested.validate();
  const ArchitectureSpec spec = requested.normalized();
  const Rng base = rng.split();
  const std::size_t d = spec.embedding_dim;
  const std::size_t nf = spec.filters;
  const std::size_t units = spec.dense_units;

  ModelParams p;
  p.spec = spec;
  if (spec.uses_chars()) {
    p.char_embedding = Tensor({spec.char_vocab_size, d});
    fill_uniform(*p.char_embedding, base.fork(1), 0.05);
  }
  if (spec.uses_words()) {
    p.word_embedding = Tensor({spec.word_vocab_size, d});
    fill_uniform(*p.word_embedding, base.fork(2), 0.05);
  }
  p.conv_filters = Tensor({nf, spec.kernel, d});
  fill_uniform(p.conv_filters, base.fork(3), std::sqrt(6.0 / static_cast<double>(spec.kernel * d)));
  p.conv_bias = Tensor({nf});
  p.dense1_weights = Tensor({spec.flatten_size(), units});
  fill_uniform(p.dense1_weights, base.fork(4),
               std::sqrt(6.0 / static_cast<double>(spec.flatten_size())));
  p.dense1_bias = Tensor({units});
  p.dense2_weights = Tensor({units, 1});
  fill_uniform(p.dense2_weights, base.fork(5), std::sqrt(3.0 / static_cast<double>(units)));
  p.dense2_bias = Tensor({1});
  return p;
}

Gradients Gradients::zeros_like(const ModelParams& params) {
  Gradients g;
  if (params.char_embedding) g.char_embedding = Tensor(params.char_embedding->shape());
  if (params.word_embedding) g.word_embedding = Tensor(params.word_embedding->shape());
  g.conv_filters = Tensor(params.conv_filters.shape());
  g.conv_bias = Tensor(params.conv_bias.shape());
  g.dense1_weights = Tensor(params.dense1_weights.shape());
  g.dense1_bias = Tensor(params.dense1_bias.shape());
  g.dense2_weights = Tensor(params.dense2_weights.shape());
  g.dense2_bias = Tensor(params.dense2_bias.shape());
  return g;
}

std::vector<Tensor*> Gradients::tensors() {
  std::vector<Tensor*> out;
  if (char_embedding) out.push_back(&*char_embedding);
  if (word_embedding) out.push_back(&*word_embedding);
  for (Tensor* t : {&conv_filters, &conv_bias, &dense1_weights, &dense1_bias, &dense2_weights,
                    &dense2_bias}) {
    out.push_back(t);
  }
  return out;
}

std::vector<const Tensor*> Gradients::tensors() const {
  auto mut = const_cast<Gradients*>(this)->tensors();
  return {mut.begin(), mut.end()};
}

ForwardResult forward(const ModelParams& params, const EncodedDocument& doc, Mode mode, Rng& rng) {
  const auto& spec = params.spec;
  ForwardCache c;
  c.spec = spec;
  c.revision = params.revision;
  if (spec.uses_chars()) c.char_ids = doc.char_ids;
  if (spec.uses_words()) c.word_ids = doc.word_ids;

  c.embedded = embed_document(params, doc);
  c.conv_pre = nn::conv1d_forward(c.embedded, params.conv_filters, params.conv_bias);
  c.conv_act = nn::relu_forward(c.conv_pre);
  c.pooled = nn::maxpool1d_forward(c.conv_act, spec.pool);
  c.flat = c.pooled.output.reshaped({spec.flatten_size()});
  c.dense1_pre = nn::dense_forward(c.flat, params.dense1_weights, params.dense1_bias);
  c.dense1_act = nn::relu_forward(c.dense1_pre);
  auto dropped = nn::dropout_forward(c.dense1_act, spec.dropout, mode, rng);
  c.dropped = std::move(dropped.output);
  c.dropout_mask = std::move(dropped.mask);
  c.logit = nn::dense_forward(c.dropped, params.dense2_weights, params.dense2_bias)[0];
  c.probability = to_probability(c.logit);
  const double p = c.probability;
  return {p, std::move(c)};
}

double predict(const ModelParams& params, const EncodedDocument& doc) {
  Rng unused(0);
  return forward(params, doc, Mode::Infer, unused).probability;
}

std::vector<double> predict_batch(const ModelParams& params, std::span<const EncodedDocument> docs,
                                  std::size_t threads) {
  std::vector<double> out(docs.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(docs.size(), 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < docs.size() && !failed; i = next++) {
        out[i] = predict(params, docs[i]);
      }
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
  return out;
}

double loss(const ForwardCache& cache, corpus::Label label) {
  return nn::bce_with_logit(cache.logit, corpus::to_int(label)).loss;
}

DocumentGradients backward_document(const ModelParams& params, const ForwardCache& c,
                                    corpus::Label label) {
  if (!(c.spec == params.spec)) {
    throw ModelError("forward cache was produced for a different architecture");
  }
  if (c.revision != params.revision) {
    throw ModelError("forward cache is stale: parameters changed since the forward pass");
  }
  const auto& spec = params.spec;
  const double dlogit = nn::bce_with_logit(c.logit, corpus::to_int(label)).logit_grad;

  DocumentGradients g;
  g.char_ids = c.char_ids;
  g.word_ids = c.word_ids;

  auto d2 = nn::dense_backward(c.dropped, params.dense2_weights, Tensor::from({1}, {dlogit}));
  g.dense2_weights = std::move(d2.weights);
  g.dense2_bias = std::move(d2.bias);

  const Tensor d_act = nn::dropout_backward(c.dropout_mask, d2.input);
  const Tensor d_pre = nn::relu_backward(c.dense1_pre, d_act);
  auto d1 = nn::dense_backward(c.flat, params.dense1_weights, d_pre);
  g.dense1_weights = std::move(d1.weights);
  g.dense1_bias = std::move(d1.bias);

  const Tensor d_pooled = d1.input.reshaped({spec.pooled_length(), spec.filters});
  const Tensor d_conv_act = nn::maxpool1d_backward(c.pooled, c.conv_act, d_pooled);
  const Tensor d_conv_pre = nn::relu_backward(c.conv_pre, d_conv_act);
  auto conv = nn::conv1d_backward(c.embedded, params.conv_filters, d_conv_pre);
  g.conv_filters = std::move(conv.filters);
  g.conv_bias = std::move(conv.bias);
  g.embedded = std::move(conv.input);
  return g;
}

void accumulate(Gradients& into, const DocumentGradients& g, double scale) {
  const std::size_t d = g.embedded.dim(1);
  auto scatter = [&](std::span<const std::uint32_t> ids, std::size_t offset, Tensor& table) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const double* src = g.embedded.row(offset + i).data();
      double* dst = table.row(ids[i]).data();
      for (std::size_t k = 0; k < d; ++k) dst[k] += scale * src[k];
    }
  };
  if (!g.char_ids.empty()) {
    if (!into.char_embedding) throw ModelError("gradient set has no character embedding");
    scatter(g.char_ids, 0, *into.char_embedding);
  }
  if (!g.word_ids.empty()) {
    if (!into.word_embedding) throw ModelError("gradient set has no word embedding");
    scatter(g.word_ids, g.char_ids.size(), *into.word_embedding);
  }
  into.conv_filters.add_scaled(g.conv_filters, scale);
  into.conv_bias.add_scaled(g.conv_bias, scale);
  into.dense1_weights.add_scaled(g.dense1_weights, scale);
  into.dense1_bias.add_scaled(g.dense1_bias, scale);
  into.dense2_weights.add_scaled(g.dense2_weights, scale);
  into.dense2_bias.add_scaled(g.dense2_bias, scale);
}

Gradients backward(const ModelParams& params, const ForwardCache& cache, corpus::Label label) {
  Gradients g = Gradients::zeros_like(params);
  accumulate(g, backward_document(params, cache, label));
  return g;
}

}  // namespace htmlphish::model
