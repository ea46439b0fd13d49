// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

namespace corerev::model {

enum class Ablation {
  full,
  no_word,             // word channel zeroed
  no_char,             // char channel zeroed
  no_attention,        // last hidden states instead of attention pooling
  word_lstm_baseline,  // no_char and no_attention together
};

// How the fused code and review vectors are combined before the final
// tanh unit. `concat` feeds [h_C ; h_R]; that score separates into a code
// part plus a review part, so every code change ranks the reviews in the
// same order. `interaction` appends the element-wise product h_C * h_R,
// which lets the score depend on the pair.
enum class ScorerKind { concat, interaction };

std::string_view to_string(Ablation a);
std::string_view to_string(ScorerKind s);
// Accepts the names above plus the variant labels core, core-wv, core-cv,
// core-atten, deepmem. Throws ConfigError otherwise.
Ablation parse_ablation(std::string_view name);
ScorerKind parse_scorer(std::string_view name);

bool uses_word(Ablation a);
bool uses_char(Ablation a);
bool uses_attention(Ablation a);

struct ModelConfig {
  std::size_t word_dim = 300;
  std::size_t char_onehot = 60;
  std::size_t hidden = 400;
  std::size_t attn_dim = 100;
  std::size_t fusion_dim = 0;  // 0 means 2 * hidden
  double dropout = 0.2;
  double lr = 1e-4;
  std::size_t epochs = 50;
  std::size_t batch = 32;
  std::size_t vocab_cap = 50000;
  std::size_t neg_m = 5;
  std::uint64_t seed = 1;
  Ablation ablation = Ablation::full;
  ScorerKind scorer = ScorerKind::interaction;
  // Word embeddings are fine-tuned only when set; pretrained vectors stay
  // fixed otherwise.
  bool train_embeddings = false;
  double init_scale = 0.05;

  std::size_t fused() const { return fusion_dim == 0 ? 2 * hidden : fusion_dim; }
  std::size_t scorer_input() const {
    return (scorer == ScorerKind::interaction ? 3 : 2) * fused();
  }
  // Throws ConfigError on zero dims, dropout outside [0, 1), negative lr,
  // batch 0, a char width below 3 (PAD, UNK and one symbol), non-finite
  // values.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

nlohmann::json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);

// Overrides fields from flat key=value settings (keys as in to_json).
// Unknown keys and unparsable values throw ConfigError.
void apply_setting(ModelConfig& c, std::string_view key, std::string_view value);
bool is_model_key(std::string_view key);

// Every field rendered as text, keyed as in to_json.
std::map<std::string, std::string> describe(const ModelConfig& c);

// The small configuration used by gradient and overfit checks.
ModelConfig tiny_config();

}  // namespace corerev::model
