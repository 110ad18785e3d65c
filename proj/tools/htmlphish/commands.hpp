#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "htmlphish/fetch.hpp"
#include "htmlphish/run_config.hpp"
#include "htmlphish/synthetic.hpp"

namespace htmlphish::cli {

namespace fs = std::filesystem;

struct VocabOptions {
  fs::path manifest;
  fs::path out_dir;
  bool chars = true;
  bool words = true;
  std::optional<std::size_t> char_vocab_cap;
  std::optional<std::size_t> word_vocab_cap;
  std::size_t top_tokens = 20;
};

struct EvalOptions {
  fs::path model;
  fs::path manifest;
  std::optional<fs::path> char_vocab;
  std::optional<fs::path> word_vocab;
  std::optional<fs::path> train_manifest;  // enables the id-overlap check
  fs::path out_dir;
  double threshold = 0.5;
  std::size_t threads = 0;
};

struct PredictOptions {
  fs::path model;
  std::optional<fs::path> char_vocab;
  std::optional<fs::path> word_vocab;
  std::string input;  // a file path or an http(s) url
  double threshold = 0.5;
  corpus::FetchLimits limits;
};

struct FetchOptions {
  fs::path url_list;  // lines of "<label> <url>"
  fs::path out_dir;
  std::string id_prefix = "web";
  std::size_t concurrency = 4;
  corpus::FetchLimits limits;
};

struct SynthOptions {
  synthetic::CorpusOptions corpus;
  fs::path out_dir;
};

struct CompareOptions {
  RunConfig run;  // variant and vocab paths are ignored
  std::optional<std::size_t> word_vocab_cap;
  fs::path out_dir;
};

void build_vocab(const VocabOptions& options, std::ostream& log);
void train(const RunConfig& config, const fs::path& out_dir, std::ostream& log);
void eval(const EvalOptions& options, std::ostream& log);
// Returns the "score=<p> verdict=<...>" line.
std::string predict(const PredictOptions& options);
void fetch(const FetchOptions& options, std::ostream& log);
void synth(const SynthOptions& options, std::ostream& log);
void compare(const CompareOptions& options, std::ostream& log);

}  // namespace htmlphish::cli
