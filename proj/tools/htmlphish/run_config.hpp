#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "htmlphish/model.hpp"
#include "htmlphish/training.hpp"

namespace htmlphish::cli {

// Everything a training run depends on. Vocabulary sizes inside
// `architecture` are taken from the vocabulary files, not from here.
struct RunConfig {
  std::string subcommand = "train";
  std::filesystem::path manifest;
  std::optional<std::filesystem::path> char_vocab;
  std::optional<std::filesystem::path> word_vocab;
  model::ArchitectureSpec architecture;
  training::TrainConfig train;
};

// Pretty-printed JSON with absolute input paths, suitable for replay.
std::string to_json(const RunConfig& config);
RunConfig run_config_from_json(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace htmlphish::cli
