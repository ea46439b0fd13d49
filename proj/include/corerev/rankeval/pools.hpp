// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "corerev/corpus/dataset.hpp"

namespace corerev::rankeval {

struct CandidatePool {
  std::size_t query = 0;                // index into PoolSet::queries
  std::vector<std::size_t> candidates;  // indices into PoolSet::reviews
  std::size_t true_index = 0;           // position of the true review in candidates
};

struct PoolSet {
  std::vector<corpus::ReviewPair> queries;
  // Distinct reviews (by review tokens): those of the queries first, then
  // the extra bank, in first-seen order. Only the review fields matter.
  std::vector<corpus::ReviewPair> reviews;
  std::vector<CandidatePool> pools;
  std::size_t pool_size = 0;
  std::uint64_t seed = 0;
};

// One pool per query: its own review at a seeded-random position among
// `pool_size` distractors drawn without replacement from the other distinct
// reviews of queries and bank. Rejects queries that are not positives and
// fewer than pool_size + 1 distinct reviews in total.
PoolSet build_pools(const std::vector<corpus::ReviewPair>& queries,
                    const std::vector<corpus::ReviewPair>& bank, std::size_t pool_size,
                    std::uint64_t seed);

// Relevancy of review `review` for query `query` (indices into the PoolSet).
using Scorer = std::function<double(std::size_t query, std::size_t review)>;

struct BucketReport {
  std::string label;
  std::size_t min_length = 0;
  std::optional<std::size_t> max_length;  // exclusive; none means open
  std::size_t count = 0;
  std::optional<double> mrr;
  std::vector<std::pair<std::size_t, double>> recall_at;
};

struct MetricsReport {
  std::vector<std::pair<std::size_t, double>> recall_at;  // k = 1, 3, 5, 10
  double mrr = 0.0;
  std::size_t count = 0;
  std::size_t pool_size = 0;
  std::uint64_t seed = 0;
  std::vector<BucketReport> buckets;
};

inline constexpr std::size_t kRecallKs[] = {1, 3, 5, 10};

struct Evaluation {
  std::vector<std::size_t> ranks;  // 1-based, one per pool
  MetricsReport report;
};

// Ranks every pool with `scorer` and reduces in pool order. Length buckets
// use the query's code word-token count: [0,25), [25,50), [50,75), [75,inf).
// Empty buckets report count 0 and no metrics.
Evaluation evaluate(const PoolSet& pools, const Scorer& scorer);

// Metrics for a given list of ranks and code lengths.
MetricsReport report_from_ranks(const std::vector<std::size_t>& ranks,
                                const std::vector<std::size_t>& code_lengths,
                                std::size_t pool_size, std::uint64_t seed);

nlohmann::json to_json(const MetricsReport& r);
std::string format_table(const MetricsReport& r);

// Scorers that know the answer: 1 for the true review and 0 otherwise, or
// the reverse. The true review of query q is the one with q's review tokens.
Scorer oracle_scorer(const PoolSet& pools, bool inverted = false);

}  // namespace corerev::rankeval
