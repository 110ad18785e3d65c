#include "htmlphish/synthetic.hpp"

#include <array>
#include <cstdio>
#include <numeric>
#include <string_view>
#include <vector>

#include "htmlphish/error.hpp"
#include "htmlphish/rng.hpp"

namespace htmlphish::synthetic {
namespace {

constexpr std::array<std::string_view, 48> kFiller = {
    "news",    "weather", "sports",  "market",  "travel",  "recipe",  "garden",  "music",
    "video",   "photo",   "review",  "guide",   "local",   "world",   "science", "health",
    "family",  "school",  "library", "museum",  "event",   "ticket",  "city",    "river",
    "mountain", "coffee", "bakery",  "fashion", "design",  "studio",  "report",  "update",
    "season",  "summer",  "winter",  "archive", "gallery", "podcast", "forum",   "blog",
    "history", "movie",   "theatre", "concert", "festival", "market", "harbor",  "garage"};

constexpr std::array<std::string_view, 8> kTags = {"p", "div", "span", "li", "h2", "section",
                                                   "article", "em"};

std::string_view pick(nn::Rng& rng, std::span<const std::string_view> pool) {
  return pool[static_cast<std::size_t>(rng.below(pool.size()))];
}

std::string filler_sentence(nn::Rng& rng, std::size_t words) {
  std::string s;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) s += ' ';
    s += pick(rng, kFiller);
  }
  return s;
}

}  // namespace

std::string page(corpus::Label label, std::uint64_t seed) {
  nn::Rng rng(seed);
  const bool phishing = label == corpus::Label::Phishing;
  std::string html = "<!DOCTYPE html>\n<html>\n<head>\n<title>";
  if (phishing) {
    html += "Account verify - sign in";
  } else {
    html += filler_sentence(rng, 2 + rng.below(2));
  }
  html += "</title>\n</head>\n<body>\n";

  const std::size_t blocks = 4 + rng.below(8);
  const std::size_t form_at = rng.below(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto tag = pick(rng, kTags);
    html += "<";
    html += tag;
    html += ">";
    html += filler_sentence(rng, 3 + rng.below(10));
    html += "</";
    html += tag;
    html += ">\n";
    if (phishing && b == form_at) {
      html +=
          "<form action=\"login.php\" method=\"post\"><input type=\"password\" "
          "name=\"pass\"><button>verify account</button></form>\n";
    }
  }
  html += "</body>\n</html>\n";
  return html;
}

corpus::CorpusManifest generate(const CorpusOptions& o) {
  if (o.phishing > o.documents) throw Error("more phishing pages requested than documents");
  nn::Rng rng(o.seed);
  std::vector<corpus::Label> labels(o.documents, corpus::Label::Legitimate);
  std::fill_n(labels.begin(), o.phishing, corpus::Label::Phishing);
  for (std::size_t i = labels.size(); i > 1; --i) {
    std::swap(labels[i - 1], labels[static_cast<std::size_t>(rng.below(i))]);
  }

  std::vector<corpus::DocumentRecord> records;
  records.reserve(o.documents);
  for (std::size_t i = 0; i < o.documents; ++i) {
    char id[64];
    std::snprintf(id, sizeof id, "%s-%06zu", o.id_prefix.c_str(), i);
    corpus::DocumentRecord::Fields f;
    f.id = id;
    f.url = std::string("http://") +
            (labels[i] == corpus::Label::Phishing ? "secure-login" : "site") + std::to_string(i) +
            ".example/";
    f.label = labels[i];
    f.collected_at = o.first_collected + o.spacing * static_cast<long>(i);
    records.push_back(corpus::DocumentRecord::from_bytes(std::move(f), page(labels[i], rng.next_u64())));
  }
  return corpus::CorpusManifest(std::move(records), {}, o.first_collected);
}

}  // namespace htmlphish::synthetic
