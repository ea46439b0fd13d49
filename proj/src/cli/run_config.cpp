// SPDX-License-Identifier: Apache-2.0
#include "corerev/cli/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "corerev/error.hpp"

namespace corerev::cli {

namespace {

std::size_t parse_size(std::string_view key, std::string_view text) {
  std::size_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ConfigError(fmt::format("{}: expected a non-negative integer, got '{}'", key, text));
  }
  return v;
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, text));
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, text));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

embed::SgnsConfig RunConfig::sgns() const {
  embed::SgnsConfig s;
  s.dim = model.word_dim;
  s.window = sgns_window;
  s.negatives = sgns_negatives;
  s.epochs = sgns_epochs;
  s.learning_rate = sgns_lr;
  s.seed = model.seed;
  return s;
}

std::filesystem::path RunConfig::path(std::string_view key) const {
  auto it = paths.find(std::string(key));
  if (it != paths.end() && !it->second.empty()) return it->second;
  std::filesystem::path data = paths.count("data") ? paths.at("data") : ".";
  if (key == "checkpoint") return data / "model.ckpt";
  if (key == "report") return data / "report.json";
  if (key == "data") return data;
  return {};
}

const std::vector<std::string>& path_keys() {
  static const std::vector<std::string> keys = {"data", "dataset", "checkpoint", "report"};
  return keys;
}

bool is_path_key(std::string_view key) {
  for (const auto& k : path_keys()) {
    if (k == key) return true;
  }
  return false;
}

std::vector<std::pair<std::string, std::string>> parse_settings(std::string_view text,
                                                                std::string_view origin) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("{}:{}: expected key=value, got '{}'", origin, line, s));
    }
    std::string_view key = trim(s.substr(0, eq));
    if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", origin, line));
    out.emplace_back(std::string(key), std::string(trim(s.substr(eq + 1))));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_settings_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_settings(buf.str(), path.string());
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  if (model::is_model_key(key)) {
    model::apply_setting(c.model, key, value);
  } else if (is_path_key(key)) {
    c.paths[std::string(key)] = std::string(value);
  } else if (key == "pool_size") {
    c.pool_size = parse_size(key, value);
  } else if (key == "valid_pool") {
    c.valid_pool = parse_size(key, value);
  } else if (key == "pretrained") {
    c.pretrained = parse_bool(key, value);
  } else if (key == "sgns_window") {
    c.sgns_window = parse_size(key, value);
  } else if (key == "sgns_negatives") {
    c.sgns_negatives = parse_size(key, value);
  } else if (key == "sgns_epochs") {
    c.sgns_epochs = parse_size(key, value);
  } else if (key == "sgns_lr") {
    c.sgns_lr = parse_double(key, value);
  } else {
    throw ConfigError(fmt::format("unknown setting '{}'", key));
  }
}

std::vector<std::pair<std::string, std::string>> environment_paths(const EnvLookup& env) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& key : path_keys()) {
    std::string name = "COREREV_";
    for (char ch : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (auto v = env(name); v && !v->empty()) out.emplace_back(key, *v);
  }
  return out;
}

EnvLookup process_environment() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

RunConfig resolve(std::string subcommand,
                  const std::vector<std::pair<std::string, std::string>>& file_settings,
                  const std::vector<std::pair<std::string, std::string>>& env_settings,
                  const std::vector<std::pair<std::string, std::string>>& flag_settings) {
  RunConfig c;
  c.subcommand = std::move(subcommand);
  for (const auto& [k, v] : file_settings) apply_setting(c, k, v);
  for (const auto& [k, v] : env_settings) {
    if (!is_path_key(k)) throw ConfigError(fmt::format("'{}' cannot come from the environment", k));
    apply_setting(c, k, v);
  }
  for (const auto& [k, v] : flag_settings) apply_setting(c, k, v);
  c.model.validate();
  if (c.sgns_window == 0 || c.sgns_epochs == 0) {
    throw ConfigError("sgns_window and sgns_epochs must be at least 1");
  }
  return c;
}

std::map<std::string, std::string> describe(const RunConfig& c) {
  auto out = model::describe(c.model);
  out["subcommand"] = c.subcommand;
  out["pool_size"] = std::to_string(c.pool_size);
  out["valid_pool"] = std::to_string(c.valid_pool);
  out["pretrained"] = c.pretrained ? "true" : "false";
  out["sgns_window"] = std::to_string(c.sgns_window);
  out["sgns_negatives"] = std::to_string(c.sgns_negatives);
  out["sgns_epochs"] = std::to_string(c.sgns_epochs);
  out["sgns_lr"] = fmt::format("{}", c.sgns_lr);
  for (const auto& key : path_keys()) out[key] = c.path(key).string();
  return out;
}

std::string render(const RunConfig& c) {
  std::string out;
  for (const auto& [k, v] : describe(c)) out += k + "=" + v + "\n";
  return out;
}

std::filesystem::path write_effective_config(const RunConfig& c,
                                             const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto path = dir / ("effective_config." + c.subcommand + ".txt");
  std::ofstream out(path, std::ios::binary);
  out << render(c);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  return path;
}

}  // namespace corerev::cli
