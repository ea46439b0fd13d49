// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corerev/embed/sgns.hpp"
#include "corerev/model/config.hpp"

namespace corerev::cli {

// Everything a subcommand runs with. Model fields live in `model`;
// pipeline knobs and paths sit beside them.
struct RunConfig {
  std::string subcommand;
  model::ModelConfig model;
  std::size_t pool_size = 50;   // distractors per test query
  std::size_t valid_pool = 50;  // distractors per validation query
  bool pretrained = true;       // train starts from the pretrain stage's vectors
  std::size_t sgns_window = 5;
  std::size_t sgns_negatives = 5;
  std::size_t sgns_epochs = 5;
  double sgns_lr = 0.025;
  std::map<std::string, std::string> paths;  // see path_keys()

  embed::SgnsConfig sgns() const;
  std::filesystem::path path(std::string_view key) const;
};

// data: working directory shared by the stages; dataset: raw JSONL input;
// checkpoint, report: outputs with defaults inside data.
const std::vector<std::string>& path_keys();
bool is_path_key(std::string_view key);

// Flat key=value text. Blank lines and lines starting with '#' are
// skipped; anything else without '=' is a ConfigError naming the line.
std::vector<std::pair<std::string, std::string>> parse_settings(std::string_view text,
                                                                std::string_view origin);
std::vector<std::pair<std::string, std::string>> read_settings_file(
    const std::filesystem::path& path);

// Sets one key; unknown keys and bad values throw ConfigError.
void apply_setting(RunConfig& c, std::string_view key, std::string_view value);

// COREREV_<KEY> for path keys only (e.g. COREREV_DATA, COREREV_CHECKPOINT).
// Numeric hyperparameters are never read from the environment.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::vector<std::pair<std::string, std::string>> environment_paths(const EnvLookup& env);
EnvLookup process_environment();

// defaults < config file < environment (paths) < flags.
RunConfig resolve(std::string subcommand,
                  const std::vector<std::pair<std::string, std::string>>& file_settings,
                  const std::vector<std::pair<std::string, std::string>>& env_settings,
                  const std::vector<std::pair<std::string, std::string>>& flag_settings);

// Every resolved value as sorted key=value lines.
std::map<std::string, std::string> describe(const RunConfig& c);
std::string render(const RunConfig& c);
// Writes effective_config.<subcommand>.txt into `dir` and returns its path.
std::filesystem::path write_effective_config(const RunConfig& c,
                                             const std::filesystem::path& dir);

}  // namespace corerev::cli
