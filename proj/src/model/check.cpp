// SPDX-License-Identifier: Apache-2.0
#include "corerev/model/check.hpp"

#include "corerev/model/core.hpp"
#include "corerev/random.hpp"
#include "corerev/tensornet/ops.hpp"

namespace corerev::model {

using tensornet::Tape;
using tensornet::Var;

namespace {

EncodedSide random_side(Rng& rng, const GradcheckSetup& setup, const ModelConfig& config) {
  EncodedSide side;
  std::size_t words = 1 + uniform_index(rng, setup.max_length);
  // Ids start at UNK: a PAD id reads the frozen row, which gets no gradient.
  for (std::size_t i = 0; i < words; ++i) {
    side.words.push_back(embed::kUnkId + static_cast<int>(uniform_index(rng, setup.vocab - 1)));
  }
  std::size_t chars = 1 + uniform_index(rng, setup.max_length);
  for (std::size_t i = 0; i < chars; ++i) {
    side.chars.push_back(embed::kUnkId +
                         static_cast<int>(uniform_index(rng, config.char_onehot - 1)));
  }
  return side;
}

}  // namespace

ModelGradcheck check_model_gradients(ModelConfig config, std::uint64_t seed,
                                     const GradcheckSetup& setup) {
  config.seed = seed;
  config.train_embeddings = true;
  config.dropout = 0.0;
  config.init_scale = setup.weight_scale;
  config.validate();
  CoreModelParams params = CoreModelParams::initialize(config, setup.vocab, setup.vocab);
  // Biases start at zero (forget gates at one); give them values too so
  // their gradients are not a special case.
  Rng rng(derive_seed(seed, 31));
  params.for_each([&](const std::string& name, tensornet::Tensor& t) {
    if (name.ends_with(".b")) {
      for (double& v : t.values()) v += uniform_real(rng, -0.1, 0.1);
    }
  });

  std::vector<EncodedPair> pairs;
  std::vector<double> labels;
  for (std::size_t i = 0; i < setup.pairs; ++i) {
    EncodedPair p;
    p.code = random_side(rng, setup, config);
    p.review = random_side(rng, setup, config);
    p.label = i % 2 == 0 ? 1.0 : 0.0;
    labels.push_back(p.label);
    pairs.push_back(std::move(p));
  }

  auto loss = [&](Tape& tape) {
    std::vector<Var> scores;
    for (const auto& p : pairs) {
      Var hc = encode_side_var(tape, params.code, p.code, config, ForwardOptions{});
      Var hr = encode_side_var(tape, params.review, p.review, config, ForwardOptions{});
      scores.push_back(score_var(tape, params, hc, hr, config));
    }
    return tensornet::mse_loss(tape, tensornet::concat(tape, scores), labels);
  };

  ModelGradcheck out;
  out.seed = seed;
  for (auto& nt : params.trainable(config)) {
    auto r = tensornet::gradcheck(loss, {nt}, setup.eps, setup.max_entries);
    if (r.max_rel_error >= out.max_rel_error) {
      out.max_rel_error = r.max_rel_error;
      out.worst = r.worst;
    }
    out.groups.push_back({nt.name, r});
  }
  return out;
}

nlohmann::json to_json(const ModelGradcheck& r) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : r.groups) {
    groups.push_back({{"group", g.group},
                      {"checked", g.result.checked},
                      {"max_rel_error", g.result.max_rel_error},
                      {"worst", g.result.worst}});
  }
  return {{"seed", r.seed}, {"max_rel_error", r.max_rel_error}, {"worst", r.worst},
          {"groups", groups}};
}

}  // namespace corerev::model
