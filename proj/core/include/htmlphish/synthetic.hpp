#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string>

#include "htmlphish/corpus.hpp"

namespace htmlphish::synthetic {

struct CorpusOptions {
  std::size_t documents = 1000;
  std::size_t phishing = 500;  // exact number of positives
  std::uint64_t seed = 1;
  std::string id_prefix = "syn";
  Timestamp first_collected = Timestamp{std::chrono::seconds{1541894400}};  // 2018-11-11
  std::chrono::seconds spacing{60};
};

// Generates small HTML pages sharing one filler vocabulary. Phishing pages
// carry a fixed marker (a credential-verification title near the top and a
// password form in the body); legitimate pages never contain those tokens.
// Records are timestamped in id order, `spacing` apart, with the classes
// interleaved at random.
corpus::CorpusManifest generate(const CorpusOptions& options);

// A single page of the given class.
std::string page(corpus::Label label, std::uint64_t seed);

}  // namespace htmlphish::synthetic
