#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "htmlphish/error.hpp"
#include "htmlphish/layers.hpp"
#include "htmlphish/rng.hpp"
#include "htmlphish/tensor.hpp"
#include "htmlphish/tokenizer.hpp"

namespace htmlphish::model {

using nn::Mode;
using nn::Rng;
using nn::Tensor;
using tokenizer::EncodedDocument;

enum class Variant : std::uint8_t { Character = 0, Word = 1, Full = 2 };

std::string_view to_string(Variant v);
// Accepts "character", "word" or "full"; throws ModelError otherwise.
Variant parse_variant(std::string_view name);
// "HTMLPhish-Character" etc., as used in comparison tables.
std::string display_name(Variant v);

// Architecture of one model. Defaults are the full-scale configuration;
// only the vocabulary sizes must be filled in.
struct ArchitectureSpec {
  Variant variant = Variant::Full;
  std::size_t char_vocab_size = 0;
  std::size_t word_vocab_size = 0;
  std::size_t char_maxlen = 180;
  std::size_t word_maxlen = 2000;
  std::size_t embedding_dim = 100;
  std::size_t filters = 32;
  std::size_t kernel = 8;
  std::size_t pool = 2;
  std::size_t dense_units = 10;
  double dropout = 0.5;

  constexpr bool uses_chars() const { return variant != Variant::Word; }
  constexpr bool uses_words() const { return variant != Variant::Character; }

  // Rows of the embedded input: the character block (if any) followed by the
  // word block (if any).
  constexpr std::size_t sequence_length() const {
    return (uses_chars() ? char_maxlen : 0) + (uses_words() ? word_maxlen : 0);
  }
  constexpr std::size_t conv_length() const { return sequence_length() - kernel + 1; }
  constexpr std::size_t pooled_length() const { return conv_length() / pool; }
  constexpr std::size_t flatten_size() const { return pooled_length() * filters; }

  // Throws ModelError describing the first violated constraint.
  void validate() const;
  // Copy with the fields of an unused stream zeroed.
  ArchitectureSpec normalized() const;

  friend bool operator==(const ArchitectureSpec&, const ArchitectureSpec&) = default;
};

// Closed-form count of trainable scalars.
std::size_t parameter_count(const ArchitectureSpec& spec);

struct TrainingMetadata {
  std::uint64_t seed = 0;
  std::uint64_t epochs = 0;
  double final_train_loss = 0.0;
  double final_val_loss = 0.0;
};

struct ModelParams {
  ArchitectureSpec spec;
  std::optional<Tensor> char_embedding;  // [V_c, d]
  std::optional<Tensor> word_embedding;  // [V_w, d]
  Tensor conv_filters;                   // [F, n, d]
  Tensor conv_bias;                      // [F]
  Tensor dense1_weights;                 // [flatten, units]
  Tensor dense1_bias;                    // [units]
  Tensor dense2_weights;                 // [units, 1]
  Tensor dense2_bias;                    // [1]
  TrainingMetadata metadata;
  // Incremented whenever the tensors change; forward caches remember it.
  std::uint64_t revision = 0;

  // Trainable tensors in a fixed order: embeddings first, then the head.
  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
  std::vector<std::string> tensor_names() const;
  // Sum of allocated tensor elements.
  std::size_t allocated_count() const;
};

// Bitwise comparison of every field except `revision`.
bool operator==(const ModelParams& a, const ModelParams& b);

// Allocates and initialises every tensor for `spec`:
//   embeddings  uniform(-0.05, 0.05)
//   conv/dense1 uniform(+-sqrt(6 / fan_in))
//   dense2      uniform(+-sqrt(3 / fan_in))
//   biases      zero
ModelParams build_model(const ArchitectureSpec& spec, Rng& rng);

// Gradient set laid out like ModelParams.
struct Gradients {
  std::optional<Tensor> char_embedding;
  std::optional<Tensor> word_embedding;
  Tensor conv_filters;
  Tensor conv_bias;
  Tensor dense1_weights;
  Tensor dense1_bias;
  Tensor dense2_weights;
  Tensor dense2_bias;

  static Gradients zeros_like(const ModelParams& params);
  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
};

struct ForwardCache {
  ArchitectureSpec spec;
  std::uint64_t revision = 0;
  std::vector<std::uint32_t> char_ids;
  std::vector<std::uint32_t> word_ids;
  Tensor embedded;     // [L, d]
  Tensor conv_pre;     // [L - n + 1, F]
  Tensor conv_act;
  nn::MaxPoolResult pooled;
  Tensor flat;         // [flatten]
  Tensor dense1_pre;   // [units]
  Tensor dense1_act;
  Tensor dropout_mask;
  Tensor dropped;
  double logit = 0.0;
  double probability = 0.5;
};

struct ForwardResult {
  double probability;
  ForwardCache cache;
};

// Runs the variant's pipeline:
//   embed -> [concat] -> conv -> relu -> maxpool -> flatten
//         -> dense1 -> relu -> dropout -> dense2 -> sigmoid
// The returned probability is kept inside (0, 1) even when the sigmoid
// saturates. Throws ModelError when a stream length differs from the spec.
ForwardResult forward(const ModelParams& params, const EncodedDocument& doc, Mode mode, Rng& rng);

// Inference-mode probability without keeping a cache.
double predict(const ModelParams& params, const EncodedDocument& doc);
// Scores documents independently, possibly on several threads. Output order
// follows input order.
std::vector<double> predict_batch(const ModelParams& params, std::span<const EncodedDocument> docs,
                                  std::size_t threads = 0);

// Binary cross-entropy of a cached forward pass, computed from the logit.
double loss(const ForwardCache& cache, corpus::Label label);

// Per-document gradients with the embedding part kept as the gradient of the
// embedded input matrix; cheaper to reduce across a batch than dense tables.
struct DocumentGradients {
  std::vector<std::uint32_t> char_ids;
  std::vector<std::uint32_t> word_ids;
  Tensor embedded;  // [L, d]
  Tensor conv_filters;
  Tensor conv_bias;
  Tensor dense1_weights;
  Tensor dense1_bias;
  Tensor dense2_weights;
  Tensor dense2_bias;
};

// Throws ModelError when the cache was produced for another spec or an
// older revision of `params`.
DocumentGradients backward_document(const ModelParams& params, const ForwardCache& cache,
                                    corpus::Label label);
// into += scale * grads, scattering embedding rows into the tables.
void accumulate(Gradients& into, const DocumentGradients& grads, double scale = 1.0);

// Dense gradients of the loss for one document.
Gradients backward(const ModelParams& params, const ForwardCache& cache, corpus::Label label);

// Binary model container, extension `.hph`.
class ModelFormatError : public Error {
 public:
  enum class Kind { Io, BadMagic, VersionMismatch, Truncated, Inconsistent };
  ModelFormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_model(const std::filesystem::path& path);

// In-memory forms of the same container.
std::string serialize_model(const ModelParams& params);
ModelParams deserialize_model(std::string_view bytes);

}  // namespace htmlphish::model
