#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "support/fixtures.hpp"
#include "support/process.hpp"

namespace htmlphish::testing {

inline ProcessResult run_cli(const std::vector<std::string>& args,
                             const std::filesystem::path& scratch) {
  return run_process(HTMLPHISH_CLI_PATH, args, scratch);
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  return nlohmann::json::parse(slurp(path));
}

// Drops the "timing" members, which are excluded from determinism checks.
inline nlohmann::json without_timing(nlohmann::json j) {
  if (j.is_object()) {
    j.erase("timing");
    for (auto& [key, value] : j.items()) value = without_timing(value);
  }
  return j;
}

// Architecture flags small enough for the toy corpus.
inline std::vector<std::string> toy_arch_flags() {
  return {"--char-maxlen", "24", "--word-maxlen", "10",   "--embedding-dim", "8",
          "--filters",     "4",  "--kernel",      "3",    "--dense-units",   "16",
          "--lr",          "0.01", "--epochs",    "5",    "--patience",      "0",
          "--seed",        "17"};
}

inline std::vector<std::string> concat(std::vector<std::string> a,
                                       const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace htmlphish::testing
