// SPDX-License-Identifier: Apache-2.0
#include "corerev/model/train.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "corerev/error.hpp"
#include "corerev/random.hpp"
#include "corerev/tensornet/optim.hpp"

namespace corerev::model {

using tensornet::Tape;
using tensornet::Tensor;

std::optional<std::size_t> TrainingHistory::best_epoch() const {
  std::optional<std::size_t> best;
  for (std::size_t e = 0; e < valid_mrr.size(); ++e) {
    if (valid_mrr[e] && (!best || *valid_mrr[e] > *valid_mrr[*best])) best = e;
  }
  return best;
}

double mean_loss(CoreModelParams& params, const std::vector<EncodedPair>& examples,
                 const ModelConfig& config) {
  if (examples.empty()) throw DataError("no examples");
  double total = 0.0;
  for (const auto& ex : examples) {
    Tape tape;
    total += tape.scalar(pair_loss(tape, params, ex, config, ForwardOptions{}));
  }
  return total / static_cast<double>(examples.size());
}

rankeval::Scorer make_model_scorer(CoreModelParams& params, const ModelConfig& config,
                                   const ModelVocabs& vocabs, const rankeval::PoolSet& pools) {
  struct Cache {
    std::vector<std::optional<std::vector<double>>> code;
    std::vector<std::optional<std::vector<double>>> review;
  };
  auto cache = std::make_shared<Cache>();
  cache->code.resize(pools.queries.size());
  cache->review.resize(pools.reviews.size());
  return [&params, config, &vocabs, &pools, cache](std::size_t q, std::size_t r) {
    auto& hc = cache->code.at(q);
    if (!hc) hc = encode_code(encode_pair(pools.queries[q], vocabs), params, config);
    auto& hr = cache->review.at(r);
    if (!hr) hr = encode_review(encode_pair(pools.reviews[r], vocabs), params, config);
    return relevancy(*hc, *hr, params, config);
  };
}

namespace {

std::optional<double> validation_mrr(CoreModelParams& params, const ModelConfig& config,
                                     const ModelVocabs& vocabs, const TrainOptions& options) {
  if (options.valid.empty()) return std::nullopt;
  std::set<std::vector<std::string>> distinct;
  for (const auto& p : options.valid) distinct.insert(p.review_tokens);
  if (distinct.size() < 2) return std::nullopt;
  std::size_t pool = std::min(options.valid_pool, distinct.size() - 1);
  auto pools = rankeval::build_pools(options.valid, {}, pool, options.valid_seed);
  return rankeval::evaluate(pools, make_model_scorer(params, config, vocabs, pools)).report.mrr;
}

}  // namespace

TrainingHistory train(CoreModelParams& params, const std::vector<EncodedPair>& examples,
                      const ModelConfig& config, const ModelVocabs& vocabs,
                      const TrainOptions& options) {
  config.validate();
  if (examples.empty()) throw DataError("empty training set");
  auto named = params.trainable(config);
  std::vector<Tensor*> tensors;
  for (auto& nt : named) tensors.push_back(nt.tensor);
  for (Tensor* t : tensors) t->zero_grad();

  tensornet::AdamState adam;
  const tensornet::AdamConfig adam_config{config.lr};
  Rng order_rng(derive_seed(config.seed, 21));
  Rng dropout_rng(derive_seed(config.seed, 22));
  ForwardOptions forward{true, &dropout_rng};

  TrainingHistory history;
  history.initial_loss = mean_loss(params, examples, config);

  std::vector<std::size_t> order(examples.size());
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order, order_rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch) {
      std::size_t end = std::min(order.size(), start + config.batch);
      const double scale = 1.0 / static_cast<double>(end - start);
      for (std::size_t i = start; i < end; ++i) {
        Tape tape;
        auto loss = pair_loss(tape, params, examples[order[i]], config, forward);
        total += tape.scalar(loss);
        tape.backward(loss, scale);
      }
      tensornet::adam_step(tensors, adam, adam_config);
      for (Tensor* t : tensors) {
        tensornet::round_to_float32(*t);
        t->zero_grad();
      }
    }
    history.train_loss.push_back(total / static_cast<double>(examples.size()));
    auto mrr = validation_mrr(params, config, vocabs, options);
    if (!options.valid.empty()) history.valid_mrr.push_back(mrr);
    if (options.on_epoch) options.on_epoch(epoch, history.train_loss.back(), mrr);
  }
  return history;
}

}  // namespace corerev::model
