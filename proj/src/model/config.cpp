// SPDX-License-Identifier: Apache-2.0
#include "corerev/model/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <vector>

#include <fmt/core.h>

#include "corerev/error.hpp"

namespace corerev::model {

namespace {

struct Field {
  std::string_view key;
  std::function<std::string(const ModelConfig&)> get;
  std::function<void(ModelConfig&, std::string_view)> set;
  bool numeric;  // rendered as a JSON number rather than a string
};

std::size_t parse_size(std::string_view key, std::string_view text) {
  std::size_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ConfigError(fmt::format("{}: expected a non-negative integer, got '{}'", key, text));
  }
  return v;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
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

#define SIZE_FIELD(name)                                                          \
  Field{#name, [](const ModelConfig& c) { return std::to_string(c.name); },       \
        [](ModelConfig& c, std::string_view v) { c.name = parse_size(#name, v); }, \
        true}
#define DOUBLE_FIELD(name)                                                          \
  Field{#name, [](const ModelConfig& c) { return fmt::format("{}", c.name); },      \
        [](ModelConfig& c, std::string_view v) { c.name = parse_double(#name, v); }, \
        true}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      SIZE_FIELD(word_dim),
      SIZE_FIELD(char_onehot),
      SIZE_FIELD(hidden),
      SIZE_FIELD(attn_dim),
      SIZE_FIELD(fusion_dim),
      DOUBLE_FIELD(dropout),
      DOUBLE_FIELD(lr),
      SIZE_FIELD(epochs),
      SIZE_FIELD(batch),
      SIZE_FIELD(vocab_cap),
      SIZE_FIELD(neg_m),
      Field{"seed", [](const ModelConfig& c) { return std::to_string(c.seed); },
            [](ModelConfig& c, std::string_view v) { c.seed = parse_u64("seed", v); }, true},
      Field{"ablation", [](const ModelConfig& c) { return std::string(to_string(c.ablation)); },
            [](ModelConfig& c, std::string_view v) { c.ablation = parse_ablation(v); }, false},
      Field{"scorer", [](const ModelConfig& c) { return std::string(to_string(c.scorer)); },
            [](ModelConfig& c, std::string_view v) { c.scorer = parse_scorer(v); }, false},
      Field{"train_embeddings",
            [](const ModelConfig& c) { return std::string(c.train_embeddings ? "true" : "false"); },
            [](ModelConfig& c, std::string_view v) {
              c.train_embeddings = parse_bool("train_embeddings", v);
            },
            false},
      DOUBLE_FIELD(init_scale),
  };
  return table;
}

#undef SIZE_FIELD
#undef DOUBLE_FIELD

const Field* find_field(std::string_view key) {
  for (const Field& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::full: return "full";
    case Ablation::no_word: return "no_word";
    case Ablation::no_char: return "no_char";
    case Ablation::no_attention: return "no_attention";
    case Ablation::word_lstm_baseline: return "word_lstm_baseline";
  }
  return "full";
}

std::string_view to_string(ScorerKind s) {
  return s == ScorerKind::concat ? "concat" : "interaction";
}

Ablation parse_ablation(std::string_view name) {
  if (name == "full" || name == "core") return Ablation::full;
  if (name == "no_word" || name == "core-wv") return Ablation::no_word;
  if (name == "no_char" || name == "core-cv") return Ablation::no_char;
  if (name == "no_attention" || name == "core-atten") return Ablation::no_attention;
  if (name == "word_lstm_baseline" || name == "deepmem") return Ablation::word_lstm_baseline;
  throw ConfigError(fmt::format("unknown ablation '{}'", name));
}

ScorerKind parse_scorer(std::string_view name) {
  if (name == "concat") return ScorerKind::concat;
  if (name == "interaction") return ScorerKind::interaction;
  throw ConfigError(fmt::format("unknown scorer '{}'", name));
}

bool uses_word(Ablation a) { return a != Ablation::no_word; }

bool uses_char(Ablation a) {
  return a != Ablation::no_char && a != Ablation::word_lstm_baseline;
}

bool uses_attention(Ablation a) {
  return a != Ablation::no_attention && a != Ablation::word_lstm_baseline;
}

void ModelConfig::validate() const {
  auto positive = [](std::string_view name, std::size_t v) {
    if (v == 0) throw ConfigError(fmt::format("{} must be at least 1", name));
  };
  positive("word_dim", word_dim);
  positive("hidden", hidden);
  positive("attn_dim", attn_dim);
  positive("batch", batch);
  positive("vocab_cap", vocab_cap);
  positive("neg_m", neg_m);
  if (char_onehot < 3) throw ConfigError("char_onehot must be at least 3");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError(fmt::format("dropout {} outside [0, 1)", dropout));
  }
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be a finite value >= 0");
  if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) {
    throw ConfigError("init_scale must be a finite value >= 0");
  }
  if (!uses_word(ablation) && !uses_char(ablation)) {
    throw ConfigError("both channels disabled");
  }
}

nlohmann::json to_json(const ModelConfig& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const Field& f : fields()) {
    std::string v = f.get(c);
    if (f.numeric) {
      j[std::string(f.key)] = nlohmann::json::parse(v);
    } else if (f.key == "train_embeddings") {
      j[std::string(f.key)] = c.train_embeddings;
    } else {
      j[std::string(f.key)] = v;
    }
  }
  return j;
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("model config must be a JSON object");
  ModelConfig c;
  for (const auto& [key, value] : j.items()) {
    std::string text = value.is_string() ? value.get<std::string>() : value.dump();
    apply_setting(c, key, text);
  }
  c.validate();
  return c;
}

void apply_setting(ModelConfig& c, std::string_view key, std::string_view value) {
  const Field* f = find_field(key);
  if (f == nullptr) throw ConfigError(fmt::format("unknown model setting '{}'", key));
  f->set(c, value);
}

bool is_model_key(std::string_view key) { return find_field(key) != nullptr; }

std::map<std::string, std::string> describe(const ModelConfig& c) {
  std::map<std::string, std::string> out;
  for (const Field& f : fields()) out[std::string(f.key)] = f.get(c);
  return out;
}

ModelConfig tiny_config() {
  ModelConfig c;
  c.word_dim = 12;
  c.char_onehot = 10;
  c.hidden = 8;
  c.attn_dim = 8;
  c.batch = 4;
  c.epochs = 300;
  c.neg_m = 2;
  c.vocab_cap = 1000;
  return c;
}

}  // namespace corerev::model
