#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "htmlphish/corpus.hpp"

namespace htmlphish::tokenizer {

using TokenId = std::uint32_t;

enum class VocabKind { Character, Word };
std::string_view to_string(VocabKind kind);

// One token per Unicode scalar value, each returned as its UTF-8 encoding.
std::vector<std::string> tokenize_chars(std::string_view html);

// Whitespace separates chunks; inside a chunk every character that is not
// alphanumeric or '_' is its own token and runs of the rest form words.
std::vector<std::string> tokenize_words(std::string_view html);

std::vector<std::string> tokenize(std::string_view html, VocabKind kind);

// Bidirectional token <-> index map. Index 0 is PAD and index 1 is OOV;
// corpus tokens occupy 2..size()-1.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kOov = 1;
  static constexpr std::string_view kPadToken = "<PAD>";
  static constexpr std::string_view kOovToken = "<OOV>";

  // `tokens` are the corpus tokens in index order (first one gets index 2).
  // Throws TokenizerError on duplicates.
  Vocabulary(VocabKind kind, std::vector<std::string> tokens);

  VocabKind kind() const { return kind_; }
  std::size_t size() const { return index_to_token_.size(); }

  // OOV for unknown tokens.
  TokenId index_of(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token_at(TokenId index) const;
  // Corpus tokens only, in index order.
  std::span<const std::string> corpus_tokens() const;

  // Line k holds the token for index k; '\\', '\n' and '\r' are escaped.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path, VocabKind kind);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.kind_ == b.kind_ && a.index_to_token_ == b.index_to_token_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  VocabKind kind_;
  std::vector<std::string> index_to_token_;
  std::unordered_map<std::string, TokenId, Hash, std::equal_to<>> token_to_index_;
};

std::string escape_token(std::string_view token);
std::string unescape_token(std::string_view line);

// Counts tokens over `docs` and ranks them by descending frequency, ties by
// first occurrence. `max_size` caps the total size including PAD and OOV.
// Throws TokenizerError when `docs` is empty or max_size < 2.
Vocabulary build_vocab(std::span<const std::string_view> docs, VocabKind kind,
                       std::optional<std::size_t> max_size = std::nullopt);

struct EncodeOptions {
  std::size_t char_maxlen = 180;
  std::size_t word_maxlen = 2000;
};

struct EncodedDocument {
  std::vector<TokenId> char_ids;
  std::vector<TokenId> word_ids;
  corpus::Label label = corpus::Label::Legitimate;

  friend bool operator==(const EncodedDocument&, const EncodedDocument&) = default;
};

// Truncates or post-pads each stream to its maxlen. A null vocabulary
// leaves that stream empty, which is what the single-stream variants want.
class Encoder {
 public:
  Encoder(const Vocabulary* char_vocab, const Vocabulary* word_vocab, EncodeOptions options = {});

  EncodedDocument encode(std::string_view html, corpus::Label label) const;
  const EncodeOptions& options() const { return options_; }

 private:
  const Vocabulary* char_vocab_;
  const Vocabulary* word_vocab_;
  EncodeOptions options_;
};

EncodedDocument encode(std::string_view html, corpus::Label label, const Vocabulary& char_vocab,
                       const Vocabulary& word_vocab, EncodeOptions options = {});

}  // namespace htmlphish::tokenizer
