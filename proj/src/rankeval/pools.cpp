// SPDX-License-Identifier: Apache-2.0
#include "corerev/rankeval/pools.hpp"

#include <map>

#include <fmt/core.h>

#include "corerev/error.hpp"
#include "corerev/random.hpp"
#include "corerev/rankeval/metrics.hpp"

namespace corerev::rankeval {

PoolSet build_pools(const std::vector<corpus::ReviewPair>& queries,
                    const std::vector<corpus::ReviewPair>& bank, std::size_t pool_size,
                    std::uint64_t seed) {
  PoolSet set;
  set.queries = queries;
  set.pool_size = pool_size;
  set.seed = seed;
  std::map<std::vector<std::string>, std::size_t> index;
  auto add_review = [&](const corpus::ReviewPair& p) {
    auto [it, inserted] = index.emplace(p.review_tokens, set.reviews.size());
    if (inserted) set.reviews.push_back(p);
    return it->second;
  };
  std::vector<std::size_t> own(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    if (queries[q].label != 1.0F) {
      throw DataError(fmt::format("query \"{}\" is not a positive pair", queries[q].id));
    }
    own[q] = add_review(queries[q]);
  }
  for (const auto& p : bank) add_review(p);
  if (!queries.empty() && set.reviews.size() < pool_size + 1) {
    throw DataError(fmt::format("pools of {} candidates need {} distinct reviews, found {}",
                                pool_size + 1, pool_size + 1, set.reviews.size()));
  }

  Rng rng(seed);
  set.pools.reserve(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    CandidatePool pool;
    pool.query = q;
    for (std::size_t pick : sample_without_replacement(rng, set.reviews.size() - 1, pool_size)) {
      pool.candidates.push_back(pick >= own[q] ? pick + 1 : pick);
    }
    pool.true_index = uniform_index(rng, pool_size + 1);
    pool.candidates.insert(pool.candidates.begin() + static_cast<long>(pool.true_index), own[q]);
    set.pools.push_back(std::move(pool));
  }
  return set;
}

namespace {

struct BucketSpec {
  const char* label;
  std::size_t lo;
  std::optional<std::size_t> hi;
};

constexpr BucketSpec kBuckets[] = {
    {"l<25", 0, 25}, {"25<=l<50", 25, 50}, {"50<=l<75", 50, 75}, {"l>=75", 75, std::nullopt}};

std::vector<std::pair<std::size_t, double>> recalls(const std::vector<std::size_t>& ranks) {
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t k : kRecallKs) out.emplace_back(k, recall_at_k(ranks, k));
  return out;
}

}  // namespace

MetricsReport report_from_ranks(const std::vector<std::size_t>& ranks,
                                const std::vector<std::size_t>& code_lengths,
                                std::size_t pool_size, std::uint64_t seed) {
  if (ranks.size() != code_lengths.size()) {
    throw ConfigError("ranks and code lengths differ in size");
  }
  if (ranks.empty()) throw ConfigError("no pools to evaluate");
  MetricsReport r;
  r.recall_at = recalls(ranks);
  r.mrr = mrr(ranks);
  r.count = ranks.size();
  r.pool_size = pool_size;
  r.seed = seed;
  for (const BucketSpec& spec : kBuckets) {
    BucketReport b{spec.label, spec.lo, spec.hi, 0, std::nullopt, {}};
    std::vector<std::size_t> sub;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      std::size_t l = code_lengths[i];
      if (l >= spec.lo && (!spec.hi || l < *spec.hi)) sub.push_back(ranks[i]);
    }
    b.count = sub.size();
    if (!sub.empty()) {
      b.mrr = mrr(sub);
      b.recall_at = recalls(sub);
    }
    r.buckets.push_back(std::move(b));
  }
  return r;
}

Evaluation evaluate(const PoolSet& pools, const Scorer& scorer) {
  Evaluation ev;
  std::vector<std::size_t> lengths;
  std::vector<double> scores;
  for (const CandidatePool& pool : pools.pools) {
    scores.clear();
    for (std::size_t c : pool.candidates) scores.push_back(scorer(pool.query, c));
    std::vector<std::size_t> ranked;
    try {
      ranked = rank_pool(scores);
    } catch (const DataError& e) {
      throw DataError(fmt::format("pool for \"{}\": {}", pools.queries[pool.query].id, e.what()));
    }
    ev.ranks.push_back(rank_of(ranked, pool.true_index));
    lengths.push_back(pools.queries[pool.query].code_tokens.size());
  }
  ev.report = report_from_ranks(ev.ranks, lengths, pools.pool_size, pools.seed);
  return ev;
}

namespace {

nlohmann::json recall_json(const std::vector<std::pair<std::size_t, double>>& r) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : r) j[std::to_string(k)] = v;
  return j;
}

std::string cell(std::optional<double> v) {
  return v ? fmt::format("{:.4f}", *v) : std::string("-");
}

}  // namespace

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json j;
  j["recall_at"] = recall_json(r.recall_at);
  j["mrr"] = r.mrr;
  j["count"] = r.count;
  j["pool_size"] = r.pool_size;
  j["seed"] = r.seed;
  j["buckets"] = nlohmann::json::array();
  for (const BucketReport& b : r.buckets) {
    nlohmann::json jb;
    jb["label"] = b.label;
    jb["min_length"] = b.min_length;
    jb["max_length"] = b.max_length ? nlohmann::json(*b.max_length) : nlohmann::json(nullptr);
    jb["count"] = b.count;
    jb["mrr"] = b.mrr ? nlohmann::json(*b.mrr) : nlohmann::json(nullptr);
    jb["recall_at"] = b.mrr ? recall_json(b.recall_at) : nlohmann::json(nullptr);
    j["buckets"].push_back(std::move(jb));
  }
  return j;
}

std::string format_table(const MetricsReport& r) {
  std::string out = fmt::format("{:<10} {:>6} {:>7} {:>7} {:>7} {:>7} {:>7}\n", "subset", "count",
                                "R@1", "R@3", "R@5", "R@10", "MRR");
  auto row = [&](const std::string& label, std::size_t count,
                 const std::vector<std::pair<std::size_t, double>>& rec, std::optional<double> m) {
    std::optional<double> c[4];
    for (std::size_t i = 0; i < rec.size() && i < 4; ++i) c[i] = rec[i].second;
    out += fmt::format("{:<10} {:>6} {:>7} {:>7} {:>7} {:>7} {:>7}\n", label, count, cell(c[0]),
                       cell(c[1]), cell(c[2]), cell(c[3]), cell(m));
  };
  row("all", r.count, r.recall_at, r.mrr);
  for (const BucketReport& b : r.buckets) row(b.label, b.count, b.recall_at, b.mrr);
  out += fmt::format("pool size {} (+1 true), seed {}\n", r.pool_size, r.seed);
  return out;
}

Scorer oracle_scorer(const PoolSet& pools, bool inverted) {
  return [&pools, inverted](std::size_t q, std::size_t review) {
    bool match = pools.reviews[review].review_tokens == pools.queries[q].review_tokens;
    return (match != inverted) ? 1.0 : 0.0;
  };
}

}  // namespace corerev::rankeval
