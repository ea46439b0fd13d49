// SPDX-License-Identifier: Apache-2.0
#include "corerev/model/core.hpp"

#include <cmath>

#include <fmt/core.h>

#include "corerev/error.hpp"
#include "corerev/tensornet/ops.hpp"

namespace corerev::model {

using tensornet::Tape;
using tensornet::Tensor;
using tensornet::Var;

ModelVocabs build_vocabs(const std::vector<corpus::ReviewPair>& train, const ModelConfig& config) {
  std::vector<std::vector<std::string>> code, review;
  std::vector<std::string> texts;
  for (const auto& p : train) {
    code.push_back(p.code_tokens);
    review.push_back(p.review_tokens);
    texts.push_back(p.code_chars);
    texts.push_back(p.review_chars);
  }
  return ModelVocabs{embed::Vocab::build(code, config.vocab_cap),
                     embed::Vocab::build(review, config.vocab_cap),
                     embed::CharAlphabet::build(texts, config.char_onehot)};
}

EncodedSide encode_side(const std::vector<std::string>& tokens, const std::string& chars,
                        const embed::Vocab& vocab, const embed::CharAlphabet& alphabet) {
  EncodedSide side{vocab.encode(tokens), alphabet.encode(chars)};
  if (side.words.empty()) side.words.push_back(embed::kPadId);
  if (side.chars.empty()) side.chars.push_back(embed::kPadId);
  return side;
}

EncodedPair encode_pair(const corpus::ReviewPair& pair, const ModelVocabs& vocabs) {
  return EncodedPair{pair.id,
                     encode_side(pair.code_tokens, pair.code_chars, vocabs.code, vocabs.chars),
                     encode_side(pair.review_tokens, pair.review_chars, vocabs.review, vocabs.chars),
                     static_cast<double>(pair.label), pair.code_tokens.size()};
}

std::vector<EncodedPair> encode_pairs(const std::vector<corpus::ReviewPair>& pairs,
                                      const ModelVocabs& vocabs) {
  std::vector<EncodedPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(encode_pair(p, vocabs));
  return out;
}

namespace {

ChannelParams make_channel(std::size_t input, const ModelConfig& c) {
  return ChannelParams{tensornet::LstmCellParams(input, c.hidden),
                       tensornet::LstmCellParams(input, c.hidden),
                       tensornet::AttentionParams(2 * c.hidden, c.attn_dim)};
}

SideParams make_side(std::size_t vocab, const ModelConfig& c) {
  return SideParams{Tensor::matrix(vocab, c.word_dim), make_channel(c.word_dim, c),
                    make_channel(c.char_onehot, c), Tensor::matrix(c.fused(), 4 * c.hidden),
                    Tensor({c.fused()})};
}

template <class Side, class Fn>
void visit_side(const std::string& prefix, Side& side, Fn&& fn) {
  fn(prefix + ".embedding", side.embedding);
  for (auto [name, ch] : {std::pair{"word", &side.word}, std::pair{"char", &side.chars}}) {
    std::string p = prefix + "." + name;
    fn(p + ".fwd.W", ch->fwd.W);
    fn(p + ".fwd.U", ch->fwd.U);
    fn(p + ".fwd.b", ch->fwd.b);
    fn(p + ".bwd.W", ch->bwd.W);
    fn(p + ".bwd.U", ch->bwd.U);
    fn(p + ".bwd.b", ch->bwd.b);
    fn(p + ".attn.Ws", ch->attn.Ws);
    fn(p + ".attn.b", ch->attn.b);
    fn(p + ".attn.v", ch->attn.v);
  }
  fn(prefix + ".fusion.W", side.fusion_W);
  fn(prefix + ".fusion.b", side.fusion_b);
}

void zero_all(CoreModelParams& p) {
  p.for_each([](const std::string&, Tensor& t) { t.fill(0.0); });
}

}  // namespace

CoreModelParams CoreModelParams::zeros(const ModelConfig& config, std::size_t code_vocab,
                                       std::size_t review_vocab) {
  config.validate();
  CoreModelParams p{make_side(code_vocab, config), make_side(review_vocab, config),
                    Tensor::matrix(1, config.scorer_input()), Tensor({1})};
  zero_all(p);
  return p;
}

CoreModelParams CoreModelParams::initialize(const ModelConfig& config, std::size_t code_vocab,
                                            std::size_t review_vocab) {
  CoreModelParams p = zeros(config, code_vocab, review_vocab);
  Rng rng(derive_seed(config.seed, 11));
  const double s = config.init_scale;
  for (SideParams* side : {&p.code, &p.review}) {
    tensornet::uniform_fill(side->embedding, rng, s);
    auto pad = side->embedding.row(static_cast<std::size_t>(embed::kPadId));
    std::fill(pad.begin(), pad.end(), 0.0);
    for (ChannelParams* ch : {&side->word, &side->chars}) {
      ch->fwd.initialize(rng, s);
      ch->bwd.initialize(rng, s);
      ch->attn.initialize(rng, s);
    }
    tensornet::uniform_fill(side->fusion_W, rng, s);
  }
  tensornet::uniform_fill(p.score_w, rng, s);
  p.for_each([](const std::string&, Tensor& t) { tensornet::round_to_float32(t); });
  return p;
}

void CoreModelParams::for_each(const std::function<void(const std::string&, Tensor&)>& fn) {
  visit_side("code", code, fn);
  visit_side("review", review, fn);
  fn("score.w", score_w);
  fn("score.b", score_b);
}

void CoreModelParams::for_each(
    const std::function<void(const std::string&, const Tensor&)>& fn) const {
  visit_side("code", code, fn);
  visit_side("review", review, fn);
  fn("score.w", score_w);
  fn("score.b", score_b);
}

std::vector<tensornet::NamedTensor> CoreModelParams::trainable(const ModelConfig& config) {
  std::vector<tensornet::NamedTensor> out;
  for_each([&](const std::string& name, Tensor& t) {
    bool is_embedding = name.ends_with(".embedding");
    if (!is_embedding || config.train_embeddings) out.push_back({name, &t});
  });
  return out;
}

bool CoreModelParams::operator==(const CoreModelParams& other) const {
  std::vector<const Tensor*> mine, theirs;
  for_each([&](const std::string&, const Tensor& t) { mine.push_back(&t); });
  other.for_each([&](const std::string&, const Tensor& t) { theirs.push_back(&t); });
  if (mine.size() != theirs.size()) return false;
  for (std::size_t i = 0; i < mine.size(); ++i) {
    if (!(*mine[i] == *theirs[i])) return false;
  }
  return true;
}

std::size_t load_pretrained(Tensor& embedding, const embed::Vocab& vocab,
                            const embed::LoadedEmbeddings& pretrained) {
  if (pretrained.matrix.dim != embedding.cols()) {
    throw ConfigError(fmt::format("pretrained dim {} but model word_dim {}",
                                  pretrained.matrix.dim, embedding.cols()));
  }
  std::size_t copied = 0;
  for (int id = embed::kUnkId + 1; static_cast<std::size_t>(id) < vocab.size(); ++id) {
    const std::string& tok = vocab.token(id);
    if (!pretrained.vocab.contains(tok)) continue;
    auto src = pretrained.matrix.row(static_cast<std::size_t>(pretrained.vocab.id(tok)));
    auto dst = embedding.row(static_cast<std::size_t>(id));
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = static_cast<double>(src[k]);
    ++copied;
  }
  return copied;
}

namespace {

Var encode_channel(Tape& tape, Var x, std::size_t length, ChannelParams& ch,
                   const ModelConfig& config) {
  auto bi = tensornet::bilstm_encode(tape, x, ch.fwd, ch.bwd, length);
  if (!uses_attention(config.ablation)) return bi.last;
  return tensornet::attention_pool(tape, bi.states, ch.attn, length);
}

}  // namespace

Var encode_side_var(Tape& tape, SideParams& side, const EncodedSide& input,
                    const ModelConfig& config, const ForwardOptions& options) {
  const std::size_t pooled = 2 * config.hidden;
  Var word, chars;
  if (uses_word(config.ablation)) {
    Var x = tensornet::embedding_lookup(tape, side.embedding, input.words,
                                        config.train_embeddings, embed::kPadId);
    word = encode_channel(tape, x, input.words.size(), side.word, config);
  } else {
    word = tape.constant(Tensor({pooled}));
  }
  if (uses_char(config.ablation)) {
    Var x = tensornet::one_hot(tape, input.chars, config.char_onehot);
    chars = encode_channel(tape, x, input.chars.size(), side.chars, config);
  } else {
    chars = tape.constant(Tensor({pooled}));
  }
  Var fused = tensornet::dense_tanh(tape, side.fusion_W, side.fusion_b,
                                    tensornet::concat(tape, {word, chars}));
  if (options.training && config.dropout > 0.0) {
    if (options.rng == nullptr) throw ConfigError("training forward pass needs an rng");
    fused = tensornet::dropout(tape, fused, config.dropout, *options.rng, true);
  }
  return fused;
}

Var score_var(Tape& tape, CoreModelParams& params, Var h_code, Var h_review,
              const ModelConfig& config) {
  std::vector<Var> parts{h_code, h_review};
  if (config.scorer == ScorerKind::interaction) {
    parts.push_back(tensornet::mul(tape, h_code, h_review));
  }
  return tensornet::dense_tanh(tape, params.score_w, params.score_b,
                               tensornet::concat(tape, parts));
}

Var pair_loss(Tape& tape, CoreModelParams& params, const EncodedPair& pair,
              const ModelConfig& config, const ForwardOptions& options) {
  Var hc = encode_side_var(tape, params.code, pair.code, config, options);
  Var hr = encode_side_var(tape, params.review, pair.review, config, options);
  Var s = score_var(tape, params, hc, hr, config);
  return tensornet::mse_loss(tape, s, std::vector<double>{pair.label});
}

namespace {

std::vector<double> encode_with(SideParams& side, const EncodedSide& input,
                                const ModelConfig& config) {
  Tape tape;
  Var h = encode_side_var(tape, side, input, config, ForwardOptions{});
  auto v = tape.value(h).values();
  return {v.begin(), v.end()};
}

}  // namespace

std::vector<double> encode_code(const EncodedPair& example, CoreModelParams& params,
                                const ModelConfig& config) {
  return encode_with(params.code, example.code, config);
}

std::vector<double> encode_review(const EncodedPair& example, CoreModelParams& params,
                                  const ModelConfig& config) {
  return encode_with(params.review, example.review, config);
}

double relevancy(const std::vector<double>& h_code, const std::vector<double>& h_review,
                 const CoreModelParams& params, const ModelConfig& config) {
  const std::size_t f = config.fused();
  if (h_code.size() != f || h_review.size() != f || params.score_w.size() != config.scorer_input()) {
    throw ConfigError(fmt::format("relevancy of {} and {} wide vectors, scorer expects {}",
                                  h_code.size(), h_review.size(), params.score_w.size()));
  }
  std::vector<double> a(h_code);
  a.insert(a.end(), h_review.begin(), h_review.end());
  if (config.scorer == ScorerKind::interaction) {
    for (std::size_t k = 0; k < f; ++k) a.push_back(h_code[k] * h_review[k]);
  }
  // Same summation order as the tape's dense_tanh, so both paths agree bitwise.
  double acc = params.score_b[0];
  for (std::size_t k = 0; k < a.size(); ++k) acc += params.score_w[k] * a[k];
  return std::tanh(acc);
}

double score_pair(const EncodedPair& pair, CoreModelParams& params, const ModelConfig& config) {
  return relevancy(encode_code(pair, params, config), encode_review(pair, params, config), params,
                   config);
}

}  // namespace corerev::model
