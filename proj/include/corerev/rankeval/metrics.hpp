// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace corerev::rankeval {

// Candidate indices by descending score; equal scores keep ascending index
// order. A non-finite score is rejected with DataError.
std::vector<std::size_t> rank_pool(std::span<const double> scores);

// 1-based position of `true_index` in a ranked list.
std::size_t rank_of(std::span<const std::size_t> ranked, std::size_t true_index);

// Fraction of ranks <= k. Empty input and rank 0 are rejected.
double recall_at_k(std::span<const std::size_t> ranks, std::size_t k);
// Mean of 1/rank. Empty input and rank 0 are rejected.
double mrr(std::span<const std::size_t> ranks);

// Expected MRR of a uniformly random ranking of n candidates, H(n)/n.
double random_mrr(std::size_t n);

}  // namespace corerev::rankeval
