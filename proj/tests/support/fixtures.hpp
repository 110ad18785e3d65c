#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "htmlphish/rng.hpp"

namespace htmlphish::testing {

struct FixtureDoc {
  std::string id;
  std::string url;
  int label = 0;
  std::string html;
  std::optional<std::string> collected_at;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

// Writes html/<id>.html files and a manifest.jsonl referencing them.
inline std::filesystem::path write_manifest(const std::filesystem::path& dir,
                                            const std::vector<FixtureDoc>& docs) {
  std::filesystem::create_directories(dir / "html");
  std::ofstream manifest(dir / "manifest.jsonl", std::ios::binary | std::ios::trunc);
  for (const auto& d : docs) {
    const std::string rel = "html/" + d.id + ".html";
    write_text(dir / rel, d.html);
    nlohmann::json line = {{"id", d.id}, {"url", d.url}, {"label", d.label}, {"html_path", rel}};
    if (d.collected_at) line["collected_at"] = *d.collected_at;
    manifest << line.dump() << '\n';
  }
  return dir / "manifest.jsonl";
}

// Short pages over a shared filler vocabulary. Positives alone contain the
// marker word, so one embedding direction separates the classes.
inline std::vector<FixtureDoc> toy_corpus(std::size_t n, std::uint64_t seed,
                                          const std::string& id_prefix = "toy") {
  static const char* kFiller[] = {"alpha", "bravo", "delta", "echo", "golf", "hotel",
                                  "india", "kilo",  "lima",  "mike", "oscar", "papa"};
  nn::Rng rng(seed);
  std::vector<FixtureDoc> docs;
  for (std::size_t i = 0; i < n; ++i) {
    FixtureDoc d;
    d.label = static_cast<int>(i % 2);
    d.id = id_prefix + "-" + std::to_string(i);
    d.url = "http://example.test/" + d.id;
    std::string body;
    if (d.label == 1) body += "zqxmarker ";
    for (int w = 0; w < 6; ++w) body += std::string(kFiller[rng.below(12)]) + " ";
    d.html = "<p>" + body + "</p>";
    docs.push_back(std::move(d));
  }
  return docs;
}

}  // namespace htmlphish::testing
