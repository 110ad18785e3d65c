#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "htmlphish/digest.hpp"
#include "htmlphish/error.hpp"
#include "htmlphish/timestamp.hpp"

namespace htmlphish::corpus {

enum class Label : std::uint8_t { Legitimate = 0, Phishing = 1 };
enum class SplitTag : std::uint8_t { Train, Test };

constexpr int to_int(Label l) { return static_cast<int>(l); }
Label label_from_int(long long value);  // throws CorpusError outside {0,1}

std::string_view to_string(SplitTag tag);

// One labelled HTML document. Values are cheap to copy and immutable; the
// HTML text is read from disk on first access and shared between copies.
class DocumentRecord {
 public:
  struct Fields {
    std::string id;
    std::string url;
    Label label = Label::Legitimate;
    std::optional<Timestamp> collected_at;
    std::optional<SplitTag> split_tag;
  };

  // In-memory document; `raw_html` holds the bytes as fetched.
  static DocumentRecord from_bytes(Fields fields, std::string raw_html);
  // Backed by a file. The file is hashed immediately and decoded lazily.
  static DocumentRecord from_file(Fields fields, std::filesystem::path html_path);

  const std::string& id() const { return fields_.id; }
  const std::string& url() const { return fields_.url; }
  Label label() const { return fields_.label; }
  const std::optional<Timestamp>& collected_at() const { return fields_.collected_at; }
  const std::optional<SplitTag>& split_tag() const { return fields_.split_tag; }
  const Fields& fields() const { return fields_; }

  // Decoded text; invalid UTF-8 sequences become U+FFFD.
  const std::string& html() const;
  // Raw bytes as stored.
  std::string raw_bytes() const;
  const Sha256& digest() const;
  // True when the raw bytes contain nothing but ASCII whitespace.
  bool blank() const;
  // Path of the backing file, empty for in-memory records.
  const std::filesystem::path& html_path() const;

 private:
  struct Source;
  DocumentRecord(Fields fields, std::shared_ptr<const Source> source);

  Fields fields_;
  std::shared_ptr<const Source> source_;
};

// Ordered collection of records with per-class counts. Construction always
// recounts, so class_counts cannot drift from the record list.
class CorpusManifest {
 public:
  CorpusManifest() = default;
  explicit CorpusManifest(std::vector<DocumentRecord> records,
                          std::vector<std::string> warnings = {},
                          std::optional<Timestamp> created_at = std::nullopt);

  const std::vector<DocumentRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t class_count(Label label) const { return class_counts_[to_int(label)]; }
  const std::array<std::size_t, 2>& class_counts() const { return class_counts_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  Timestamp created_at() const { return created_at_; }

 private:
  std::vector<DocumentRecord> records_;
  std::array<std::size_t, 2> class_counts_{0, 0};
  std::vector<std::string> warnings_;
  Timestamp created_at_{};
};

// Reads a line-delimited JSON manifest. `html_path` entries resolve relative
// to the manifest's directory. Records sharing (url, content digest) with an
// earlier record are dropped with a warning.
CorpusManifest load_manifest(const std::filesystem::path& path);

// Writes every record's raw bytes to `dir/html/<n>.html` and a matching
// `dir/manifest.jsonl`; returns the manifest path.
std::filesystem::path write_corpus(const CorpusManifest& manifest,
                                   const std::filesystem::path& dir);

// Drops blank documents and repeated content digests (first occurrence
// wins). Order of the survivors is unchanged.
CorpusManifest sanitize(const CorpusManifest& manifest);

struct TemporalSplit {
  CorpusManifest train;  // collected_at <  boundary
  CorpusManifest test;   // collected_at >= boundary
};

TemporalSplit temporal_split(const CorpusManifest& manifest, Timestamp boundary);

// Records whose ids appear in both manifests.
std::vector<std::string> overlapping_ids(const CorpusManifest& a, const CorpusManifest& b);

}  // namespace htmlphish::corpus
