#include "htmlphish/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "htmlphish/corpus.hpp"
#include "htmlphish/experiment.hpp"
#include "htmlphish/metrics.hpp"
#include "htmlphish/model.hpp"
#include "htmlphish/text.hpp"
#include "htmlphish/tokenizer.hpp"
#include "htmlphish/training.hpp"

namespace htmlphish::cli {
namespace {

using nlohmann::json;
using tokenizer::VocabKind;
using tokenizer::Vocabulary;

constexpr const char* kModelFile = "model.hph";

// Writes through a temporary sibling so a file either appears complete or
// not at all.
void write_file(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw Error("cannot write '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

void save_model_atomic(const model::ModelParams& params, const fs::path& path) {
  const fs::path tmp = path.string() + ".tmp";
  model::save_model(params, tmp);
  fs::rename(tmp, path);
}

void save_vocab_atomic(const Vocabulary& vocab, const fs::path& path) {
  const fs::path tmp = path.string() + ".tmp";
  vocab.save(tmp);
  fs::rename(tmp, path);
}

void write_roc_atomic(const std::optional<metrics::RocCurve>& roc, const fs::path& path) {
  const fs::path tmp = path.string() + ".tmp";
  metrics::write_roc_csv(roc.value_or(metrics::RocCurve{}), tmp);
  fs::rename(tmp, path);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error("cannot create output directory '" + dir.string() + "'");
  }
}

std::string kind_label(VocabKind kind) {
  return kind == VocabKind::Character ? "character" : "word";
}

Vocabulary load_vocab(const std::optional<fs::path>& path, VocabKind kind) {
  if (!path) throw Error("a " + kind_label(kind) + " vocabulary file is required for this variant");
  if (!fs::is_regular_file(*path)) {
    throw Error("cannot read " + kind_label(kind) + " vocabulary '" + path->string() + "'");
  }
  return Vocabulary::load(*path, kind);
}

corpus::CorpusManifest load_nonempty_manifest(const fs::path& path, std::ostream& log) {
  if (!fs::is_regular_file(path)) throw Error("cannot read manifest '" + path.string() + "'");
  auto manifest = corpus::load_manifest(path);
  for (const auto& w : manifest.warnings()) log << "warning: " << w << '\n';
  if (manifest.empty()) throw Error("manifest '" + path.string() + "' has no documents");
  return manifest;
}

// Vocabularies matching the model's streams, checked against its spec.
struct ModelVocabs {
  std::optional<Vocabulary> chars;
  std::optional<Vocabulary> words;

  tokenizer::Encoder encoder(const model::ArchitectureSpec& spec) const {
    return tokenizer::Encoder(chars ? &*chars : nullptr, words ? &*words : nullptr,
                              {spec.char_maxlen, spec.word_maxlen});
  }
};

ModelVocabs load_model_vocabs(const model::ArchitectureSpec& spec,
                              const std::optional<fs::path>& char_path,
                              const std::optional<fs::path>& word_path) {
  ModelVocabs v;
  auto check = [](const Vocabulary& vocab, std::size_t expected, VocabKind kind) {
    if (vocab.size() != expected) {
      throw Error(kind_label(kind) + " vocabulary has " + std::to_string(vocab.size()) +
                  " entries but the model expects " + std::to_string(expected));
    }
  };
  if (spec.uses_chars()) {
    v.chars = load_vocab(char_path, VocabKind::Character);
    check(*v.chars, spec.char_vocab_size, VocabKind::Character);
  }
  if (spec.uses_words()) {
    v.words = load_vocab(word_path, VocabKind::Word);
    check(*v.words, spec.word_vocab_size, VocabKind::Word);
  }
  return v;
}

std::vector<tokenizer::EncodedDocument> encode_all(const corpus::CorpusManifest& manifest,
                                                   const tokenizer::Encoder& encoder) {
  std::vector<tokenizer::EncodedDocument> docs;
  docs.reserve(manifest.size());
  for (const auto& r : manifest.records()) docs.push_back(encoder.encode(r.html(), r.label()));
  return docs;
}

// Splits an EvalReport into its deterministic part and its timing.
std::pair<json, json> split_report(const metrics::EvalReport& report) {
  json j = json::parse(metrics::to_json(report));
  json timing = j.at("timing");
  j.erase("timing");
  return {j, timing};
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json vocab_summary(const Vocabulary& vocab, std::size_t top) {
  json tokens = json::array();
  const auto body = vocab.corpus_tokens();
  for (std::size_t i = 0; i < body.size() && i < top; ++i) tokens.push_back(text::sanitize_utf8(body[i]));
  return {{"size", vocab.size()}, {"top_tokens", tokens}};
}

std::string format_score(double p, double threshold) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return std::string("score=") + buf + " verdict=" + (p >= threshold ? "phishing" : "legitimate");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in || !fs::is_regular_file(path)) throw Error("cannot read '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool is_url(std::string_view s) { return s.starts_with("http://") || s.starts_with("https://"); }

}  // namespace

void build_vocab(const VocabOptions& options, std::ostream& log) {
  if (!options.chars && !options.words) throw Error("nothing to build: both vocabularies disabled");
  const auto manifest = load_nonempty_manifest(options.manifest, log);
  std::vector<std::string_view> docs;
  docs.reserve(manifest.size());
  for (const auto& r : manifest.records()) docs.emplace_back(r.html());

  std::optional<Vocabulary> chars;
  std::optional<Vocabulary> words;
  if (options.chars) chars = tokenizer::build_vocab(docs, VocabKind::Character, options.char_vocab_cap);
  if (options.words) words = tokenizer::build_vocab(docs, VocabKind::Word, options.word_vocab_cap);

  ensure_dir(options.out_dir);
  json summary = {{"documents", manifest.size()}};
  if (chars) {
    save_vocab_atomic(*chars, options.out_dir / "char.vocab");
    summary["character"] = vocab_summary(*chars, options.top_tokens);
    log << "character vocabulary: " << chars->size() << " entries\n";
  }
  if (words) {
    save_vocab_atomic(*words, options.out_dir / "word.vocab");
    summary["word"] = vocab_summary(*words, options.top_tokens);
    log << "word vocabulary: " << words->size() << " entries\n";
  }
  write_file(options.out_dir / "vocab_summary.json", summary.dump(2) + "\n");
}

void train(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  training::TrainConfig tc = config.train;
  tc.variant = config.architecture.variant;
  tc.validate();

  const auto manifest = load_nonempty_manifest(config.manifest, log);
  model::ArchitectureSpec spec = config.architecture;
  ModelVocabs vocabs;
  if (spec.uses_chars()) {
    vocabs.chars = load_vocab(config.char_vocab, VocabKind::Character);
    spec.char_vocab_size = vocabs.chars->size();
  }
  if (spec.uses_words()) {
    vocabs.words = load_vocab(config.word_vocab, VocabKind::Word);
    spec.word_vocab_size = vocabs.words->size();
  }
  spec = spec.normalized();
  spec.validate();

  const auto docs = encode_all(manifest, vocabs.encoder(spec));
  const auto split = training::split_dataset<tokenizer::EncodedDocument>(docs, tc.split_fractions,
                                                                         tc.seed);
  nn::Rng init_rng(tc.seed);
  std::ostringstream epoch_log;
  auto on_epoch = [&](const training::EpochStats& s) {
    std::ostringstream line;
    line << "epoch " << s.epoch << " train_loss=" << s.train_loss;
    if (s.val_loss) line << " val_loss=" << *s.val_loss;
    if (s.val_accuracy) line << " val_accuracy=" << *s.val_accuracy;
    line << '\n';
    epoch_log << line.str();
    log << line.str();
  };
  auto result = training::train(model::build_model(spec, init_rng), tc, split.train, split.val,
                                on_epoch);
  result.report.final_model_path = kModelFile;

  const auto validation = experiment::evaluate_model(result.model, split.val, 0.5, tc.threads);
  const auto test = experiment::evaluate_model(result.model, split.test, 0.5, tc.threads);
  const auto training_cut = training::evaluate(result.model, split.train, tc.threads);

  json epochs = json::array();
  json epoch_seconds = json::array();
  for (const auto& e : result.report.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"val_loss", optional_number(e.val_loss)},
                      {"val_accuracy", optional_number(e.val_accuracy)}});
    epoch_seconds.push_back(e.seconds);
  }
  auto [val_json, val_timing] = split_report(validation);
  auto [test_json, test_timing] = split_report(test);
  json report = {
      {"subcommand", "train"},
      {"variant", model::to_string(spec.variant)},
      {"model", result.report.final_model_path},
      {"seed", tc.seed},
      {"parameters", model::parameter_count(spec)},
      {"documents",
       {{"train", split.train.size()}, {"validation", split.val.size()}, {"test", split.test.size()}}},
      {"epochs", epochs},
      {"best_epoch", result.report.best_epoch ? json(*result.report.best_epoch) : json(nullptr)},
      {"early_stopped", result.report.early_stopped},
      {"validation", val_json},
      {"test", test_json},
      {"training_cut", {{"loss", training_cut.loss}, {"accuracy", training_cut.accuracy}}},
      {"timing",
       {{"training_seconds", result.report.total_seconds},
        {"epoch_seconds", epoch_seconds},
        {"validation", val_timing},
        {"test", test_timing}}},
  };

  RunConfig resolved = config;
  resolved.train = tc;

  ensure_dir(out_dir);
  save_model_atomic(result.model, out_dir / kModelFile);
  write_roc_atomic(test.roc, out_dir / "roc.csv");
  write_file(out_dir / "train.log", epoch_log.str());
  write_file(out_dir / "run.json", to_json(resolved));
  write_file(out_dir / "report.json", report.dump(2) + "\n");
  log << "wrote " << (out_dir / kModelFile).string() << '\n';
}

void eval(const EvalOptions& options, std::ostream& log) {
  const auto params = model::load_model(options.model);
  const auto manifest = load_nonempty_manifest(options.manifest, log);

  json overlap = {{"checked", false}, {"shared_ids", nullptr}};
  if (options.train_manifest) {
    const auto trained_on = corpus::load_manifest(*options.train_manifest);
    const auto shared = corpus::overlapping_ids(trained_on, manifest);
    if (!shared.empty()) {
      throw CorpusError("evaluation manifest shares " + std::to_string(shared.size()) +
                        " document id(s) with the training manifest, e.g. '" + shared.front() +
                        "'");
    }
    overlap = {{"checked", true}, {"shared_ids", 0}};
  }

  const auto vocabs = load_model_vocabs(params.spec, options.char_vocab, options.word_vocab);
  const auto docs = encode_all(manifest, vocabs.encoder(params.spec));
  const auto result =
      experiment::evaluate_model(params, docs, options.threshold, options.threads);

  auto [body, timing] = split_report(result);
  json report = {
      {"subcommand", "eval"},
      {"variant", model::to_string(params.spec.variant)},
      {"overlap", overlap},
      {"evaluation", body},
      {"timing", timing},
  };
  ensure_dir(options.out_dir);
  write_roc_atomic(result.roc, options.out_dir / "roc.csv");
  write_file(options.out_dir / "report.json", report.dump(2) + "\n");
  log << "accuracy="
      << (result.metrics.accuracy ? std::to_string(*result.metrics.accuracy) : "n/a")
      << " documents=" << result.documents << '\n';
}

std::string predict(const PredictOptions& options) {
  const auto params = model::load_model(options.model);
  const auto vocabs = load_model_vocabs(params.spec, options.char_vocab, options.word_vocab);
  const std::string html = is_url(options.input)
                               ? corpus::fetch_html(options.input, options.limits).text()
                               : text::sanitize_utf8(read_file(options.input));
  const auto doc = vocabs.encoder(params.spec).encode(html, corpus::Label::Legitimate);
  return format_score(model::predict(params, doc), options.threshold);
}

void fetch(const FetchOptions& options, std::ostream& log) {
  std::ifstream in(options.url_list);
  if (!in) throw Error("cannot read url list '" + options.url_list.string() + "'");
  std::vector<std::string> urls;
  std::vector<corpus::Label> labels;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    int label = -1;
    std::string url;
    if (!(fields >> label >> url) || (label != 0 && label != 1)) {
      throw Error(options.url_list.string() + ":" + std::to_string(n) +
                  ": expected '<0|1> <url>'");
    }
    labels.push_back(corpus::label_from_int(label));
    urls.push_back(url);
  }
  if (urls.empty()) throw Error("url list '" + options.url_list.string() + "' is empty");

  const auto outcomes = corpus::fetch_all(urls, options.limits, options.concurrency);
  const auto now = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
  std::vector<corpus::DocumentRecord> records;
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].result) {
      warnings.push_back(urls[i] + ": " + outcomes[i].error);
      continue;
    }
    char id[32];
    std::snprintf(id, sizeof id, "-%06zu", i + 1);
    corpus::DocumentRecord::Fields f;
    f.id = options.id_prefix + id;
    f.url = urls[i];
    f.label = labels[i];
    f.collected_at = now;
    records.push_back(corpus::DocumentRecord::from_bytes(std::move(f), outcomes[i].result->bytes));
  }
  for (const auto& w : warnings) log << "warning: " << w << '\n';
  if (records.empty()) throw Error("no document could be fetched");
  const auto cleaned = corpus::sanitize(corpus::CorpusManifest(std::move(records), warnings));
  for (std::size_t i = warnings.size(); i < cleaned.warnings().size(); ++i) {
    log << "warning: " << cleaned.warnings()[i] << '\n';
  }
  ensure_dir(options.out_dir);
  const auto path = corpus::write_corpus(cleaned, options.out_dir);
  log << "wrote " << cleaned.size() << " documents to " << path.string() << '\n';
}

void synth(const SynthOptions& options, std::ostream& log) {
  const auto manifest = synthetic::generate(options.corpus);
  ensure_dir(options.out_dir);
  const auto path = corpus::write_corpus(manifest, options.out_dir);
  log << "wrote " << manifest.size() << " documents to " << path.string() << '\n';
}

void compare(const CompareOptions& options, std::ostream& log) {
  const auto manifest = load_nonempty_manifest(options.run.manifest, log);
  experiment::ExperimentConfig config;
  config.architecture = options.run.architecture;
  config.train = options.run.train;
  config.word_vocab_cap = options.word_vocab_cap;
  config.train.validate();

  const auto outcomes = experiment::compare_variants(manifest, config);
  const auto rows = experiment::comparison_rows(outcomes);
  const std::string observation = experiment::ordering_observation(outcomes);

  json variants = json::array();
  json timing = json::object();
  for (const auto& o : outcomes) {
    auto [held_out, held_out_timing] = split_report(o.held_out);
    variants.push_back({{"variant", model::to_string(o.variant)},
                        {"model", model::display_name(o.variant)},
                        {"parameters", o.parameters},
                        {"held_out", held_out},
                        {"training_cut_accuracy", o.training_cut_accuracy}});
    timing[model::to_string(o.variant)] = {{"training_seconds", o.training.total_seconds},
                                           {"held_out", held_out_timing}};
  }
  json report = {{"subcommand", "compare"},
                 {"seed", config.train.seed},
                 {"variants", variants},
                 {"observation", observation},
                 {"timing", timing}};
  const std::string table = metrics::render_comparison_table(rows);

  ensure_dir(options.out_dir);
  write_file(options.out_dir / "comparison.md", table + "\n" + observation + "\n");
  write_file(options.out_dir / "report.json", report.dump(2) + "\n");
  log << table << '\n' << observation << '\n';
}

}  // namespace htmlphish::cli
