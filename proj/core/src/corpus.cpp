#include "htmlphish/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "htmlphish/error.hpp"
#include "htmlphish/text.hpp"

namespace htmlphish::corpus {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot read html file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool is_blank(std::string_view bytes) {
  return std::all_of(bytes.begin(), bytes.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  });
}

Timestamp now_seconds() {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

}  // namespace

Label label_from_int(long long value) {
  if (value != 0 && value != 1) {
    throw CorpusError("label must be 0 or 1 (got " + std::to_string(value) + ")");
  }
  return static_cast<Label>(value);
}

std::string_view to_string(SplitTag tag) { return tag == SplitTag::Train ? "train" : "test"; }

struct DocumentRecord::Source {
  std::filesystem::path path;
  std::string inline_bytes;
  Sha256 digest{};
  bool blank = true;

  mutable std::once_flag decoded_once;
  mutable std::string decoded;
};

DocumentRecord::DocumentRecord(Fields fields, std::shared_ptr<const Source> source)
    : fields_(std::move(fields)), source_(std::move(source)) {}

DocumentRecord DocumentRecord::from_bytes(Fields fields, std::string raw_html) {
  auto src = std::make_shared<Source>();
  src->digest = sha256(raw_html);
  src->blank = is_blank(raw_html);
  src->inline_bytes = std::move(raw_html);
  return DocumentRecord(std::move(fields), std::move(src));
}

DocumentRecord DocumentRecord::from_file(Fields fields, std::filesystem::path html_path) {
  auto src = std::make_shared<Source>();
  const std::string bytes = read_file(html_path);
  src->digest = sha256(bytes);
  src->blank = is_blank(bytes);
  src->path = std::move(html_path);
  return DocumentRecord(std::move(fields), std::move(src));
}

const std::string& DocumentRecord::html() const {
  std::call_once(source_->decoded_once, [this] {
    if (source_->path.empty()) {
      source_->decoded = text::sanitize_utf8(source_->inline_bytes);
    } else {
      source_->decoded = text::sanitize_utf8(read_file(source_->path));
    }
  });
  return source_->decoded;
}

std::string DocumentRecord::raw_bytes() const {
  return source_->path.empty() ? source_->inline_bytes : read_file(source_->path);
}

const Sha256& DocumentRecord::digest() const { return source_->digest; }
bool DocumentRecord::blank() const { return source_->blank; }
const std::filesystem::path& DocumentRecord::html_path() const { return source_->path; }

CorpusManifest::CorpusManifest(std::vector<DocumentRecord> records,
                               std::vector<std::string> warnings,
                               std::optional<Timestamp> created_at)
    : records_(std::move(records)),
      warnings_(std::move(warnings)),
      created_at_(created_at.value_or(now_seconds())) {
  for (const auto& r : records_) ++class_counts_[to_int(r.label())];
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("manifest not found: " + path.string());
  const auto base = path.parent_path();

  std::vector<DocumentRecord> records;
  std::vector<std::string> warnings;
  std::map<std::pair<std::string, Sha256>, std::string> seen_content;
  std::set<std::string> seen_ids;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    DocumentRecord::Fields fields;
    std::filesystem::path html_path;
    try {
      const auto obj = nlohmann::json::parse(line);
      if (!obj.is_object()) throw CorpusError("expected a JSON object");
      fields.id = obj.at("id").get<std::string>();
      fields.url = obj.at("url").get<std::string>();
      const auto& label = obj.at("label");
      if (!label.is_number_integer()) throw CorpusError("label must be an integer");
      fields.label = label_from_int(label.get<long long>());
      html_path = base / obj.at("html_path").get<std::string>();
      if (auto it = obj.find("collected_at"); it != obj.end() && !it->is_null()) {
        fields.collected_at = parse_rfc3339(it->get<std::string>());
      }
      if (auto it = obj.find("split"); it != obj.end() && !it->is_null()) {
        const auto tag = it->get<std::string>();
        if (tag == "train") {
          fields.split_tag = SplitTag::Train;
        } else if (tag == "test") {
          fields.split_tag = SplitTag::Test;
        } else {
          throw CorpusError("split must be \"train\" or \"test\"");
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw CorpusError(where + "malformed manifest line: " + e.what());
    } catch (const Error& e) {
      throw CorpusError(where + e.what());
    }
    if (!std::filesystem::is_regular_file(html_path)) {
      throw CorpusError(where + "html file not found: " + html_path.string());
    }

    auto record = DocumentRecord::from_file(std::move(fields), html_path);
    auto key = std::make_pair(record.url(), record.digest());
    if (auto it = seen_content.find(key); it != seen_content.end()) {
      warnings.push_back(where + "record '" + record.id() + "' duplicates '" + it->second +
                         "' (same url and content digest); dropped");
      continue;
    }
    if (!seen_ids.insert(record.id()).second) {
      throw CorpusError(where + "duplicate record id '" + record.id() + "'");
    }
    seen_content.emplace(std::move(key), record.id());
    records.push_back(std::move(record));
  }
  return CorpusManifest(std::move(records), std::move(warnings));
}

std::filesystem::path write_corpus(const CorpusManifest& manifest,
                                   const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "html");
  const auto manifest_path = dir / "manifest.jsonl";
  std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorpusError("cannot write " + manifest_path.string());

  std::size_t n = 0;
  for (const auto& r : manifest.records()) {
    char name[32];
    std::snprintf(name, sizeof name, "%06zu.html", n++);
    const fs::path rel = fs::path("html") / name;
    {
      std::ofstream html(dir / rel, std::ios::binary | std::ios::trunc);
      const auto bytes = r.raw_bytes();
      html.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (!html) throw CorpusError("cannot write " + (dir / rel).string());
    }
    nlohmann::json line = {{"id", r.id()},
                           {"url", r.url()},
                           {"label", to_int(r.label())},
                           {"html_path", rel.generic_string()}};
    if (r.collected_at()) line["collected_at"] = format_rfc3339(*r.collected_at());
    if (r.split_tag()) line["split"] = std::string(to_string(*r.split_tag()));
    out << line.dump() << '\n';
  }
  if (!out) throw CorpusError("cannot write " + manifest_path.string());
  return manifest_path;
}

CorpusManifest sanitize(const CorpusManifest& manifest) {
  std::vector<DocumentRecord> kept;
  std::vector<std::string> warnings = manifest.warnings();
  std::map<Sha256, std::string> seen;
  for (const auto& r : manifest.records()) {
    if (r.blank()) {
      warnings.push_back("record '" + r.id() + "' has empty content; dropped");
      continue;
    }
    auto [it, inserted] = seen.emplace(r.digest(), r.id());
    if (!inserted) {
      warnings.push_back("record '" + r.id() + "' replicates '" + it->second + "'; dropped");
      continue;
    }
    kept.push_back(r);
  }
  return CorpusManifest(std::move(kept), std::move(warnings), manifest.created_at());
}

TemporalSplit temporal_split(const CorpusManifest& manifest, Timestamp boundary) {
  std::vector<DocumentRecord> train;
  std::vector<DocumentRecord> test;
  for (const auto& r : manifest.records()) {
    if (!r.collected_at()) {
      throw CorpusError("record '" + r.id() + "' has no collected_at timestamp");
    }
    (*r.collected_at() < boundary ? train : test).push_back(r);
  }
  return {CorpusManifest(std::move(train), {}, manifest.created_at()),
          CorpusManifest(std::move(test), {}, manifest.created_at())};
}

std::vector<std::string> overlapping_ids(const CorpusManifest& a, const CorpusManifest& b) {
  std::unordered_set<std::string> ids;
  for (const auto& r : a.records()) ids.insert(r.id());
  std::vector<std::string> out;
  for (const auto& r : b.records()) {
    if (ids.count(r.id())) out.push_back(r.id());
  }
  return out;
}

}  // namespace htmlphish::corpus
