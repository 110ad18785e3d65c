#include "htmlphish/run_config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace htmlphish::cli {
namespace {

using nlohmann::json;

json optional_path(const std::optional<std::filesystem::path>& p) {
  if (!p) return nullptr;
  return std::filesystem::absolute(*p).lexically_normal().string();
}

std::optional<std::filesystem::path> path_or_null(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return std::filesystem::path(j.at(key).get<std::string>());
}

}  // namespace

std::string to_json(const RunConfig& c) {
  const auto& a = c.architecture;
  const auto& t = c.train;
  json j = {
      {"subcommand", c.subcommand},
      {"manifest", std::filesystem::absolute(c.manifest).lexically_normal().string()},
      {"char_vocab", optional_path(c.char_vocab)},
      {"word_vocab", optional_path(c.word_vocab)},
      {"seed", t.seed},
      {"architecture",
       {{"variant", model::to_string(a.variant)},
        {"char_maxlen", a.char_maxlen},
        {"word_maxlen", a.word_maxlen},
        {"embedding_dim", a.embedding_dim},
        {"filters", a.filters},
        {"kernel", a.kernel},
        {"pool", a.pool},
        {"dense_units", a.dense_units},
        {"dropout", a.dropout}}},
      {"training",
       {{"batch_size", t.batch_size},
        {"learning_rate", t.learning_rate},
        {"epochs", t.epochs},
        {"split_fractions", t.split_fractions},
        {"early_stop_patience",
         t.early_stop_patience ? json(*t.early_stop_patience) : json(nullptr)},
        {"threads", t.threads}}},
  };
  return j.dump(2) + "\n";
}

RunConfig run_config_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    RunConfig c;
    c.subcommand = j.at("subcommand").get<std::string>();
    c.manifest = j.at("manifest").get<std::string>();
    c.char_vocab = path_or_null(j, "char_vocab");
    c.word_vocab = path_or_null(j, "word_vocab");

    const json& a = j.at("architecture");
    c.architecture.variant = model::parse_variant(a.at("variant").get<std::string>());
    c.architecture.char_maxlen = a.at("char_maxlen").get<std::size_t>();
    c.architecture.word_maxlen = a.at("word_maxlen").get<std::size_t>();
    c.architecture.embedding_dim = a.at("embedding_dim").get<std::size_t>();
    c.architecture.filters = a.at("filters").get<std::size_t>();
    c.architecture.kernel = a.at("kernel").get<std::size_t>();
    c.architecture.pool = a.at("pool").get<std::size_t>();
    c.architecture.dense_units = a.at("dense_units").get<std::size_t>();
    c.architecture.dropout = a.at("dropout").get<double>();

    const json& t = j.at("training");
    c.train.variant = c.architecture.variant;
    c.train.batch_size = t.at("batch_size").get<std::size_t>();
    c.train.learning_rate = t.at("learning_rate").get<double>();
    c.train.epochs = t.at("epochs").get<std::size_t>();
    c.train.seed = j.at("seed").get<std::uint64_t>();
    c.train.split_fractions = t.at("split_fractions").get<std::array<double, 3>>();
    if (t.at("early_stop_patience").is_null()) {
      c.train.early_stop_patience.reset();
    } else {
      c.train.early_stop_patience = t.at("early_stop_patience").get<std::size_t>();
    }
    c.train.threads = t.value("threads", std::size_t{0});
    return c;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed run config: ") + e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read run config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return run_config_from_json(text.str());
}

}  // namespace htmlphish::cli
