// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "corerev/corpus/dataset.hpp"
#include "corerev/embed/sgns.hpp"
#include "corerev/embed/vocab.hpp"
#include "corerev/model/config.hpp"
#include "corerev/random.hpp"
#include "corerev/tensornet/gradcheck.hpp"
#include "corerev/tensornet/layers.hpp"
#include "corerev/tensornet/tape.hpp"

namespace corerev::model {

// Token and character id sequences for one side of a pair. Neither is ever
// empty: an empty input becomes a single PAD step.
struct EncodedSide {
  std::vector<int> words;
  std::vector<int> chars;
};

struct EncodedPair {
  std::string id;
  EncodedSide code;
  EncodedSide review;
  double label = 1.0;
  std::size_t code_length = 0;  // code word tokens before encoding
};

// Id maps used by a model: code and review sides keep separate word
// vocabularies; one byte alphabet serves both char channels.
struct ModelVocabs {
  embed::Vocab code;
  embed::Vocab review;
  embed::CharAlphabet chars;

  bool operator==(const ModelVocabs&) const = default;
};

// Vocabularies built from training positives (word cap from the config,
// alphabet of width char_onehot).
ModelVocabs build_vocabs(const std::vector<corpus::ReviewPair>& train, const ModelConfig& config);

EncodedSide encode_side(const std::vector<std::string>& tokens, const std::string& chars,
                        const embed::Vocab& vocab, const embed::CharAlphabet& alphabet);
EncodedPair encode_pair(const corpus::ReviewPair& pair, const ModelVocabs& vocabs);
std::vector<EncodedPair> encode_pairs(const std::vector<corpus::ReviewPair>& pairs,
                                      const ModelVocabs& vocabs);

struct ChannelParams {
  tensornet::LstmCellParams fwd;
  tensornet::LstmCellParams bwd;
  tensornet::AttentionParams attn;
};

struct SideParams {
  tensornet::Tensor embedding;  // [vocab, word_dim]; row PAD stays zero
  ChannelParams word;
  ChannelParams chars;
  tensornet::Tensor fusion_W;  // [fused, 4 * hidden]
  tensornet::Tensor fusion_b;  // [fused]
};

struct CoreModelParams {
  SideParams code;
  SideParams review;
  tensornet::Tensor score_w;  // [1, scorer_input]
  tensornet::Tensor score_b;  // [1]

  // Shapes for the config and vocabulary sizes, all values zero.
  static CoreModelParams zeros(const ModelConfig& config, std::size_t code_vocab,
                               std::size_t review_vocab);
  // Seeded uniform(-init_scale, init_scale) weights, zero biases, forget
  // biases 1.0, embeddings uniform except the PAD rows.
  static CoreModelParams initialize(const ModelConfig& config, std::size_t code_vocab,
                                    std::size_t review_vocab);

  // Every array with a stable dotted name, in a fixed order.
  void for_each(const std::function<void(const std::string&, tensornet::Tensor&)>& fn);
  void for_each(
      const std::function<void(const std::string&, const tensornet::Tensor&)>& fn) const;
  // The arrays the optimizer updates: everything, minus the embeddings
  // unless train_embeddings is set.
  std::vector<tensornet::NamedTensor> trainable(const ModelConfig& config);

  bool operator==(const CoreModelParams& other) const;
};

// Copies pretrained vectors into the rows of tokens both vocabularies
// share. Returns the number of rows copied. Dim mismatch is a ConfigError.
std::size_t load_pretrained(tensornet::Tensor& embedding, const embed::Vocab& vocab,
                            const embed::LoadedEmbeddings& pretrained);

struct ForwardOptions {
  bool training = false;
  Rng* rng = nullptr;  // required when training with dropout > 0
};

// Tape-level building blocks.
tensornet::Var encode_side_var(tensornet::Tape& tape, SideParams& side, const EncodedSide& input,
                               const ModelConfig& config, const ForwardOptions& options);
tensornet::Var score_var(tensornet::Tape& tape, CoreModelParams& params, tensornet::Var h_code,
                         tensornet::Var h_review, const ModelConfig& config);
// Squared error of one pair's score against its label.
tensornet::Var pair_loss(tensornet::Tape& tape, CoreModelParams& params, const EncodedPair& pair,
                         const ModelConfig& config, const ForwardOptions& options);

// Inference entry points (no dropout).
std::vector<double> encode_code(const EncodedPair& example, CoreModelParams& params,
                                const ModelConfig& config);
std::vector<double> encode_review(const EncodedPair& example, CoreModelParams& params,
                                  const ModelConfig& config);
// tanh(w . a + b) with a = [h_C ; h_R] or [h_C ; h_R ; h_C * h_R].
double relevancy(const std::vector<double>& h_code, const std::vector<double>& h_review,
                 const CoreModelParams& params, const ModelConfig& config);
double score_pair(const EncodedPair& pair, CoreModelParams& params, const ModelConfig& config);

}  // namespace corerev::model
