// SPDX-License-Identifier: Apache-2.0
#include "corerev/rankeval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "corerev/error.hpp"

namespace corerev::rankeval {

std::vector<std::size_t> rank_pool(std::span<const double> scores) {
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw DataError(fmt::format("candidate {} has non-finite score {}", i, scores[i]));
    }
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

std::size_t rank_of(std::span<const std::size_t> ranked, std::size_t true_index) {
  auto it = std::find(ranked.begin(), ranked.end(), true_index);
  if (it == ranked.end()) {
    throw ConfigError(fmt::format("candidate {} not in ranked list", true_index));
  }
  return static_cast<std::size_t>(it - ranked.begin()) + 1;
}

namespace {

void check_ranks(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw ConfigError("no ranks to score");
  if (std::find(ranks.begin(), ranks.end(), std::size_t{0}) != ranks.end()) {
    throw ConfigError("ranks are 1-based; got 0");
  }
}

}  // namespace

double recall_at_k(std::span<const std::size_t> ranks, std::size_t k) {
  check_ranks(ranks);
  auto hits = std::count_if(ranks.begin(), ranks.end(), [k](std::size_t r) { return r <= k; });
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double mrr(std::span<const std::size_t> ranks) {
  check_ranks(ranks);
  double total = 0.0;
  for (std::size_t r : ranks) total += 1.0 / static_cast<double>(r);
  return total / static_cast<double>(ranks.size());
}

double random_mrr(std::size_t n) {
  if (n == 0) throw ConfigError("random_mrr of an empty pool");
  double h = 0.0;
  for (std::size_t r = 1; r <= n; ++r) h += 1.0 / static_cast<double>(r);
  return h / static_cast<double>(n);
}

}  // namespace corerev::rankeval
