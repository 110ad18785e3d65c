#include "htmlphish/tokenizer.hpp"

#include <algorithm>
#include <fstream>

#include "htmlphish/error.hpp"
#include "htmlphish/text.hpp"

namespace htmlphish::tokenizer {
namespace {

// Streams tokens to `emit` until it returns false.
template <typename Emit>
void visit_chars(std::string_view html, Emit&& emit) {
  for (char32_t c : text::decode_utf8(html)) {
    if (!emit(text::encode_utf8(c))) return;
  }
}

template <typename Emit>
void visit_words(std::string_view html, Emit&& emit) {
  const std::u32string scalars = text::decode_utf8(html);
  std::u32string run;
  auto flush = [&] {
    if (run.empty()) return true;
    const bool more = emit(text::encode_utf8(run));
    run.clear();
    return more;
  };
  for (char32_t c : scalars) {
    if (text::is_whitespace(c)) {
      if (!flush()) return;
    } else if (text::is_word_char(c)) {
      run.push_back(c);
    } else {
      if (!flush()) return;
      if (!emit(text::encode_utf8(c))) return;
    }
  }
  flush();
}

template <typename Emit>
void visit(std::string_view html, VocabKind kind, Emit&& emit) {
  if (kind == VocabKind::Character) {
    visit_chars(html, std::forward<Emit>(emit));
  } else {
    visit_words(html, std::forward<Emit>(emit));
  }
}

std::vector<TokenId> encode_stream(std::string_view html, const Vocabulary& vocab,
                                   std::size_t maxlen) {
  std::vector<TokenId> ids;
  ids.reserve(maxlen);
  if (maxlen > 0) {
    visit(html, vocab.kind(), [&](const std::string& tok) {
      ids.push_back(vocab.index_of(tok));
      return ids.size() < maxlen;
    });
  }
  ids.resize(maxlen, Vocabulary::kPad);
  return ids;
}

}  // namespace

std::string_view to_string(VocabKind kind) {
  return kind == VocabKind::Character ? "character" : "word";
}

std::vector<std::string> tokenize_chars(std::string_view html) {
  std::vector<std::string> out;
  visit_chars(html, [&](std::string tok) {
    out.push_back(std::move(tok));
    return true;
  });
  return out;
}

std::vector<std::string> tokenize_words(std::string_view html) {
  std::vector<std::string> out;
  visit_words(html, [&](std::string tok) {
    out.push_back(std::move(tok));
    return true;
  });
  return out;
}

std::vector<std::string> tokenize(std::string_view html, VocabKind kind) {
  return kind == VocabKind::Character ? tokenize_chars(html) : tokenize_words(html);
}

Vocabulary::Vocabulary(VocabKind kind, std::vector<std::string> tokens) : kind_(kind) {
  index_to_token_.reserve(tokens.size() + 2);
  index_to_token_.emplace_back(kPadToken);
  index_to_token_.emplace_back(kOovToken);
  token_to_index_.reserve(tokens.size());
  for (auto& tok : tokens) {
    const auto index = static_cast<TokenId>(index_to_token_.size());
    if (!token_to_index_.emplace(tok, index).second) {
      throw TokenizerError("duplicate vocabulary token '" + escape_token(tok) + "'");
    }
    index_to_token_.push_back(std::move(tok));
  }
}

TokenId Vocabulary::index_of(std::string_view token) const {
  auto it = token_to_index_.find(token);
  return it == token_to_index_.end() ? kOov : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return token_to_index_.find(token) != token_to_index_.end();
}

const std::string& Vocabulary::token_at(TokenId index) const {
  if (index >= index_to_token_.size()) {
    throw TokenizerError("token index " + std::to_string(index) + " out of range");
  }
  return index_to_token_[index];
}

std::span<const std::string> Vocabulary::corpus_tokens() const {
  return std::span<const std::string>(index_to_token_).subspan(2);
}

std::string escape_token(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (char c : token) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape_token(std::string_view line) {
  std::string out;
  out.reserve(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] != '\\') {
      out.push_back(line[i]);
      continue;
    }
    if (++i == line.size()) throw TokenizerError("dangling escape in vocabulary line");
    switch (line[i]) {
      case '\\': out.push_back('\\'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      default: throw TokenizerError(std::string("unknown escape \\") + line[i]);
    }
  }
  return out;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TokenizerError("cannot write vocabulary " + path.string());
  for (const auto& tok : index_to_token_) out << escape_token(tok) << '\n';
  if (!out) throw TokenizerError("cannot write vocabulary " + path.string());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path, VocabKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TokenizerError("vocabulary file not found: " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line != kPadToken) {
      throw TokenizerError(path.string() + ": first line must be the PAD sentinel");
    }
    if (line_no == 2 && line != kOovToken) {
      throw TokenizerError(path.string() + ": second line must be the OOV sentinel");
    }
    if (line_no <= 2) continue;
    try {
      tokens.push_back(unescape_token(line));
    } catch (const TokenizerError& e) {
      throw TokenizerError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (line_no < 2) throw TokenizerError(path.string() + ": missing sentinel lines");
  return Vocabulary(kind, std::move(tokens));
}

Vocabulary build_vocab(std::span<const std::string_view> docs, VocabKind kind,
                       std::optional<std::size_t> max_size) {
  if (docs.empty()) throw TokenizerError("cannot build a vocabulary from an empty corpus");
  if (max_size && *max_size < 2) {
    throw TokenizerError("vocabulary cap must leave room for PAD and OOV");
  }
  struct Stat {
    std::size_t count = 0;
    std::size_t first = 0;
  };
  std::unordered_map<std::string, Stat> stats;
  std::size_t position = 0;
  for (auto doc : docs) {
    visit(doc, kind, [&](std::string tok) {
      auto [it, inserted] = stats.try_emplace(std::move(tok));
      if (inserted) it->second.first = position;
      ++it->second.count;
      ++position;
      return true;
    });
  }
  std::vector<std::pair<std::string, Stat>> ranked(std::make_move_iterator(stats.begin()),
                                                   std::make_move_iterator(stats.end()));
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count > b.second.count;
    return a.second.first < b.second.first;
  });
  if (max_size && ranked.size() > *max_size - 2) ranked.resize(*max_size - 2);
  std::vector<std::string> tokens;
  tokens.reserve(ranked.size());
  for (auto& [tok, _] : ranked) tokens.push_back(std::move(tok));
  return Vocabulary(kind, std::move(tokens));
}

Encoder::Encoder(const Vocabulary* char_vocab, const Vocabulary* word_vocab,
                 EncodeOptions options)
    : char_vocab_(char_vocab), word_vocab_(word_vocab), options_(options) {
  if (char_vocab_ && char_vocab_->kind() != VocabKind::Character) {
    throw TokenizerError("character stream needs a character vocabulary");
  }
  if (word_vocab_ && word_vocab_->kind() != VocabKind::Word) {
    throw TokenizerError("word stream needs a word vocabulary");
  }
}

EncodedDocument Encoder::encode(std::string_view html, corpus::Label label) const {
  EncodedDocument doc;
  if (char_vocab_) doc.char_ids = encode_stream(html, *char_vocab_, options_.char_maxlen);
  if (word_vocab_) doc.word_ids = encode_stream(html, *word_vocab_, options_.word_maxlen);
  doc.label = label;
  return doc;
}

EncodedDocument encode(std::string_view html, corpus::Label label, const Vocabulary& char_vocab,
                       const Vocabulary& word_vocab, EncodeOptions options) {
  return Encoder(&char_vocab, &word_vocab, options).encode(html, label);
}

}  // namespace htmlphish::tokenizer
