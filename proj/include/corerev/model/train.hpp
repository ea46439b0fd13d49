// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "corerev/corpus/dataset.hpp"
#include "corerev/model/config.hpp"
#include "corerev/model/core.hpp"
#include "corerev/rankeval/pools.hpp"

namespace corerev::model {

struct TrainingHistory {
  double initial_loss = 0.0;  // mean loss over the training set before any update
  std::vector<double> train_loss;  // per epoch, mean over the epoch's examples
  std::vector<std::optional<double>> valid_mrr;  // per epoch; empty without a valid set

  // Epoch (0-based) with the highest validation MRR, if any was recorded.
  std::optional<std::size_t> best_epoch() const;
  bool operator==(const TrainingHistory&) const = default;
};

struct TrainOptions {
  // Validation positives; MRR is computed on pools of up to valid_pool
  // distractors after every epoch when non-empty.
  std::vector<corpus::ReviewPair> valid;
  std::size_t valid_pool = 50;
  std::uint64_t valid_seed = 7;
  std::function<void(std::size_t epoch, double loss, std::optional<double> valid_mrr)> on_epoch;
};

// Mean squared error over shuffled mini-batches, Adam updates, parameters
// rounded to float32 after every step so checkpoints store them exactly.
// Deterministic for a given config seed. Rejects an empty training set.
TrainingHistory train(CoreModelParams& params, const std::vector<EncodedPair>& examples,
                      const ModelConfig& config, const ModelVocabs& vocabs,
                      const TrainOptions& options = {});

// Mean loss without dropout.
double mean_loss(CoreModelParams& params, const std::vector<EncodedPair>& examples,
                 const ModelConfig& config);

// Scores pool candidates with a model, encoding each query and each review
// once and applying the scorer to the cached vectors.
rankeval::Scorer make_model_scorer(CoreModelParams& params, const ModelConfig& config,
                                   const ModelVocabs& vocabs, const rankeval::PoolSet& pools);

}  // namespace corerev::model
