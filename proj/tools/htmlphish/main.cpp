#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "htmlphish/commands.hpp"
#include "htmlphish/timestamp.hpp"

namespace {

using namespace htmlphish;
namespace fs = std::filesystem;

// Model and training knobs shared by train and compare.
struct TrainFlags {
  std::string variant = "full";
  std::size_t patience = 3;
  double val_fraction = 0.1;
  double test_fraction = 0.1;
};

void add_train_flags(CLI::App* cmd, cli::RunConfig& run, TrainFlags& flags) {
  auto& a = run.architecture;
  auto& t = run.train;
  cmd->add_option("--manifest", run.manifest, "Training manifest (JSONL)")->required();
  cmd->add_option("--epochs", t.epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--batch-size", t.batch_size, "Mini-batch size")->capture_default_str();
  cmd->add_option("--lr", t.learning_rate, "Adam learning rate")->capture_default_str();
  cmd->add_option("--seed", t.seed, "Seed for initialisation, splitting and dropout")
      ->capture_default_str();
  cmd->add_option("--patience", flags.patience, "Early-stopping patience in epochs, 0 disables")
      ->capture_default_str();
  cmd->add_option("--val-fraction", flags.val_fraction, "Validation share of the manifest")
      ->capture_default_str();
  cmd->add_option("--test-fraction", flags.test_fraction, "Held-out test share of the manifest")
      ->capture_default_str();
  cmd->add_option("--threads", t.threads, "Worker threads, 0 for all cores")->capture_default_str();
  cmd->add_option("--char-maxlen", a.char_maxlen, "Character sequence length")
      ->capture_default_str();
  cmd->add_option("--word-maxlen", a.word_maxlen, "Word sequence length")->capture_default_str();
  cmd->add_option("--embedding-dim", a.embedding_dim, "Embedding width")->capture_default_str();
  cmd->add_option("--filters", a.filters, "Convolution filters")->capture_default_str();
  cmd->add_option("--kernel", a.kernel, "Convolution kernel length")->capture_default_str();
  cmd->add_option("--dense-units", a.dense_units, "Hidden dense units")->capture_default_str();
  cmd->add_option("--dropout", a.dropout, "Dropout rate")->capture_default_str();
}

void resolve_train_flags(cli::RunConfig& run, const TrainFlags& flags) {
  run.architecture.variant = model::parse_variant(flags.variant);
  run.train.variant = run.architecture.variant;
  run.train.split_fractions = {1.0 - flags.val_fraction - flags.test_fraction, flags.val_fraction,
                               flags.test_fraction};
  if (flags.patience == 0) {
    run.train.early_stop_patience.reset();
  } else {
    run.train.early_stop_patience = flags.patience;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phishing web page detection from raw HTML"};
  app.require_subcommand(1);

  cli::VocabOptions vocab;
  std::string vocab_kind = "both";
  std::size_t char_cap = 0;
  std::size_t word_cap = 0;
  auto* build_vocab = app.add_subcommand("build-vocab", "Build vocabularies from a manifest");
  build_vocab->add_option("--manifest", vocab.manifest, "Training manifest (JSONL)")->required();
  build_vocab->add_option("--out-dir", vocab.out_dir, "Output directory")->required();
  build_vocab->add_option("--kind", vocab_kind, "Vocabularies to build")
      ->check(CLI::IsMember({"char", "word", "both"}))
      ->capture_default_str();
  build_vocab->add_option("--char-vocab-cap", char_cap, "Cap on character vocabulary size");
  build_vocab->add_option("--word-vocab-cap", word_cap, "Cap on word vocabulary size");

  cli::RunConfig run;
  TrainFlags train_flags;
  fs::path train_out;
  auto* train = app.add_subcommand("train", "Train one model variant");
  add_train_flags(train, run, train_flags);
  train->add_option("--variant", train_flags.variant, "full, word or character")
      ->check(CLI::IsMember({"full", "word", "character"}))
      ->capture_default_str();
  train->add_option("--char-vocab", run.char_vocab, "Character vocabulary file");
  train->add_option("--word-vocab", run.word_vocab, "Word vocabulary file");
  train->add_option("--out-dir", train_out, "Output directory")->required();

  fs::path replay_config;
  fs::path replay_out;
  auto* replay = app.add_subcommand("replay", "Re-run a training run from its run.json");
  replay->add_option("run", replay_config, "run.json written by train")->required();
  replay->add_option("--out-dir", replay_out, "Output directory")->required();

  cli::EvalOptions eval;
  auto* evaluate = app.add_subcommand("eval", "Score a manifest with a trained model");
  evaluate->add_option("--model", eval.model, "Model file")->required();
  evaluate->add_option("--manifest", eval.manifest, "Manifest to score")->required();
  evaluate->add_option("--char-vocab", eval.char_vocab, "Character vocabulary file");
  evaluate->add_option("--word-vocab", eval.word_vocab, "Word vocabulary file");
  evaluate->add_option("--train-manifest", eval.train_manifest,
                       "Training manifest; evaluation fails if any id is shared");
  evaluate->add_option("--out-dir", eval.out_dir, "Output directory")->required();
  evaluate->add_option("--threshold", eval.threshold, "Decision threshold")->capture_default_str();
  evaluate->add_option("--threads", eval.threads, "Worker threads, 0 for all cores");

  cli::PredictOptions predict;
  auto* pred = app.add_subcommand("predict", "Score one HTML file or url");
  pred->add_option("--model", predict.model, "Model file")->required();
  pred->add_option("--char-vocab", predict.char_vocab, "Character vocabulary file");
  pred->add_option("--word-vocab", predict.word_vocab, "Word vocabulary file");
  pred->add_option("--threshold", predict.threshold, "Decision threshold")->capture_default_str();
  pred->add_option("input", predict.input, "HTML file or http(s) url")->required();

  cli::FetchOptions fetch;
  std::size_t timeout_ms = 30'000;
  auto* fetch_cmd = app.add_subcommand("fetch", "Download pages into a corpus directory");
  fetch_cmd->add_option("--urls", fetch.url_list, "File of '<label> <url>' lines")->required();
  fetch_cmd->add_option("--out-dir", fetch.out_dir, "Corpus directory")->required();
  fetch_cmd->add_option("--id-prefix", fetch.id_prefix, "Document id prefix")->capture_default_str();
  fetch_cmd->add_option("--concurrency", fetch.concurrency, "Requests in flight")
      ->capture_default_str();
  fetch_cmd->add_option("--timeout-ms", timeout_ms, "Per-request timeout")->capture_default_str();
  fetch_cmd->add_option("--max-bytes", fetch.limits.max_bytes, "Body size limit")
      ->capture_default_str();
  fetch_cmd->add_option("--max-redirects", fetch.limits.max_redirects, "Redirect limit")
      ->capture_default_str();

  cli::SynthOptions synth;
  std::string synth_start = "2018-11-11T00:00:00Z";
  std::int64_t synth_spacing = 60;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a labelled synthetic corpus");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Corpus directory")->required();
  synth_cmd->add_option("--documents", synth.corpus.documents, "Number of pages")
      ->capture_default_str();
  synth_cmd->add_option("--phishing", synth.corpus.phishing, "Number of phishing pages")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.corpus.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--id-prefix", synth.corpus.id_prefix, "Document id prefix")
      ->capture_default_str();
  synth_cmd->add_option("--start", synth_start, "Collection time of the first page (RFC 3339)")
      ->capture_default_str();
  synth_cmd->add_option("--spacing-seconds", synth_spacing, "Seconds between pages")
      ->capture_default_str();

  cli::CompareOptions compare;
  TrainFlags compare_flags;
  auto* compare_cmd = app.add_subcommand("compare", "Train and compare all three variants");
  add_train_flags(compare_cmd, compare.run, compare_flags);
  compare_cmd->add_option("--word-vocab-cap", compare.word_vocab_cap, "Cap on word vocabulary size");
  compare_cmd->add_option("--out-dir", compare.out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build_vocab) {
      vocab.chars = vocab_kind != "word";
      vocab.words = vocab_kind != "char";
      if (char_cap) vocab.char_vocab_cap = char_cap;
      if (word_cap) vocab.word_vocab_cap = word_cap;
      cli::build_vocab(vocab, std::cerr);
    } else if (*train) {
      resolve_train_flags(run, train_flags);
      cli::train(run, train_out, std::cerr);
    } else if (*replay) {
      cli::train(cli::load_run_config(replay_config), replay_out, std::cerr);
    } else if (*evaluate) {
      cli::eval(eval, std::cerr);
    } else if (*pred) {
      std::cout << cli::predict(predict) << '\n';
    } else if (*fetch_cmd) {
      fetch.limits.timeout = std::chrono::milliseconds(timeout_ms);
      cli::fetch(fetch, std::cerr);
    } else if (*synth_cmd) {
      synth.corpus.first_collected = parse_rfc3339(synth_start);
      synth.corpus.spacing = std::chrono::seconds(synth_spacing);
      cli::synth(synth, std::cerr);
    } else if (*compare_cmd) {
      resolve_train_flags(compare.run, compare_flags);
      cli::compare(compare, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "htmlphish: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
