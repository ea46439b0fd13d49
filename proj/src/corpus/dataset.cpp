// SPDX-License-Identifier: Apache-2.0
#include "corerev/corpus/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include <fmt/core.h>
#include <json.hpp>

#include "corerev/codelex/lexer.hpp"
#include "corerev/corpus/text.hpp"
#include "corerev/error.hpp"
#include "corerev/random.hpp"

namespace corerev::corpus {

namespace {

using nlohmann::json;

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
  });
}

std::string require_string(const json& record, const char* field,
                           std::size_t line) {
  auto it = record.find(field);
  if (it == record.end()) {
    throw DataError(fmt::format("line {}: missing field \"{}\"", line, field));
  }
  if (!it->is_string()) {
    throw DataError(
        fmt::format("line {}: field \"{}\" is not a string", line, field));
  }
  return it->get<std::string>();
}

bool is_author_reply(const json& record) {
  if (auto it = record.find("author_reply"); it != record.end() &&
                                             it->is_boolean() &&
                                             it->get<bool>()) {
    return true;
  }
  auto reviewer = record.find("review_author");
  auto author = record.find("pr_author");
  return reviewer != record.end() && author != record.end() &&
         reviewer->is_string() && author->is_string() && *reviewer == *author;
}

std::string join_truncated(const std::vector<std::string>& tokens,
                           std::size_t limit) {
  std::string out;
  for (const std::string& tok : tokens) {
    if (!out.empty()) out += ' ';
    out += tok;
    if (out.size() >= limit) break;
  }
  if (out.size() > limit) {
    // Cut on a UTF-8 boundary so the stored text stays valid.
    std::size_t cut = limit;
    while (cut > 0 && (static_cast<unsigned char>(out[cut]) & 0xC0) == 0x80) {
      --cut;
    }
    out.resize(cut);
  }
  return out;
}

template <class T>
void truncate(std::vector<T>& v, std::size_t limit) {
  if (v.size() > limit) v.resize(limit);
}

}  // namespace

std::vector<RawPair> parse_dataset(const std::string& jsonl,
                                   const IngestOptions& options) {
  std::vector<RawPair> pairs;
  std::unordered_set<std::string> ids;
  std::istringstream in(jsonl);
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (is_blank(text)) continue;
    json record;
    try {
      record = json::parse(text);
    } catch (const json::parse_error& e) {
      throw DataError(fmt::format("line {}: invalid JSON ({})", line, e.what()));
    }
    if (!record.is_object()) {
      throw DataError(fmt::format("line {}: record is not an object", line));
    }
    RawPair pair;
    pair.id = require_string(record, "id", line);
    pair.project = require_string(record, "project", line);
    pair.code_change = require_string(record, "code_change", line);
    pair.review = require_string(record, "review", line);
    if (!ids.insert(pair.id).second) {
      throw DataError(fmt::format("line {}: duplicate id \"{}\"", line, pair.id));
    }
    if (is_author_reply(record)) continue;
    if (is_blank(pair.code_change) || is_blank(pair.review)) continue;
    if (ascii_ratio(pair.review) < options.min_ascii_ratio) continue;
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::vector<RawPair> load_dataset(const std::filesystem::path& path,
                                  const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open dataset {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), options);
}

std::vector<RawPair> deduplicate(std::vector<RawPair> pairs) {
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<RawPair> out;
  out.reserve(pairs.size());
  for (RawPair& p : pairs) {
    if (seen.emplace(p.code_change, p.review).second) out.push_back(std::move(p));
  }
  return out;
}

ReviewPair preprocess(const RawPair& raw, const TrimLimits& limits) {
  ReviewPair pair;
  pair.id = raw.id;
  pair.code_tokens = codelex::code_change_tokens(raw.code_change);
  pair.review_tokens = normalize_review(raw.review);
  truncate(pair.code_tokens, limits.code_tokens);
  truncate(pair.review_tokens, limits.review_tokens);
  pair.code_chars = join_truncated(pair.code_tokens, limits.chars);
  pair.review_chars = join_truncated(pair.review_tokens, limits.chars);
  pair.label = 1.0F;
  return pair;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& r) {
  if (!(r.train > 0 && r.valid > 0 && r.test > 0)) {
    throw ConfigError("split ratios must all be positive");
  }
  double total = r.train + r.valid + r.test;
  auto part = [&](double x) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * x / total));
  };
  std::size_t valid = part(r.valid);
  std::size_t test = part(r.test);
  return {n - valid - test, valid, test};
}

DatasetSplit split_dataset(const std::vector<RawPair>& pairs,
                           const SplitRatios& ratios, std::uint64_t seed,
                           const TrimLimits& limits) {
  if (pairs.size() < 3) {
    throw DataError(fmt::format(
        "cannot split {} pairs into train/valid/test partitions", pairs.size()));
  }
  std::unordered_set<std::string> ids;
  for (const RawPair& p : pairs) {
    if (!ids.insert(p.id).second) {
      throw DataError(fmt::format("duplicate pair id \"{}\"", p.id));
    }
  }
  auto sizes = split_sizes(pairs.size(), ratios);

  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  shuffle(order, rng);

  DatasetSplit split;
  split.seed = seed;
  std::size_t i = 0;
  for (auto [dest, count] : {std::pair{&split.train, sizes[0]},
                             std::pair{&split.valid, sizes[1]},
                             std::pair{&split.test, sizes[2]}}) {
    dest->reserve(count);
    for (std::size_t k = 0; k < count; ++k, ++i) {
      dest->push_back(preprocess(pairs[order[i]], limits));
    }
  }
  return split;
}

std::vector<ReviewPair> sample_negatives(const std::vector<ReviewPair>& positives,
                                         std::size_t m, std::uint64_t seed) {
  if (m < 1) throw ConfigError("negative count m must be at least 1");

  // Distinct reviews of the partition, in first-seen order.
  std::map<std::vector<std::string>, std::size_t> review_index;
  std::vector<const ReviewPair*> reviews;
  std::vector<std::size_t> own(positives.size());
  for (std::size_t i = 0; i < positives.size(); ++i) {
    const ReviewPair& p = positives[i];
    if (p.label != 1.0F) {
      throw DataError(fmt::format("pair \"{}\" is not a positive", p.id));
    }
    auto [it, inserted] = review_index.emplace(p.review_tokens, reviews.size());
    if (inserted) reviews.push_back(&p);
    own[i] = it->second;
  }
  if (!positives.empty() && reviews.size() < m + 1) {
    throw DataError(fmt::format(
        "need at least {} distinct reviews for m={} negatives, partition has {}",
        m + 1, m, reviews.size()));
  }

  Rng rng(seed);
  std::vector<ReviewPair> negatives;
  negatives.reserve(positives.size() * m);
  for (std::size_t i = 0; i < positives.size(); ++i) {
    const ReviewPair& pos = positives[i];
    // Draw from the distinct reviews with this positive's own review removed.
    std::vector<std::size_t> picks =
        sample_without_replacement(rng, reviews.size() - 1, m);
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t r = picks[k] >= own[i] ? picks[k] + 1 : picks[k];
      ReviewPair neg;
      neg.id = fmt::format("{}#neg{}", pos.id, k);
      neg.code_tokens = pos.code_tokens;
      neg.code_chars = pos.code_chars;
      neg.review_tokens = reviews[r]->review_tokens;
      neg.review_chars = reviews[r]->review_chars;
      neg.label = 0.0F;
      negatives.push_back(std::move(neg));
    }
  }
  return negatives;
}

void save_pairs(const std::filesystem::path& path,
                const std::vector<ReviewPair>& pairs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  for (const ReviewPair& p : pairs) {
    json record = {
        {"id", p.id},
        {"code_tokens", p.code_tokens},
        {"review_tokens", p.review_tokens},
        {"code_chars", p.code_chars},
        {"review_chars", p.review_chars},
        {"label", p.label},
    };
    out << record.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

std::vector<ReviewPair> load_pairs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
  std::vector<ReviewPair> pairs;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (is_blank(text)) continue;
    try {
      json r = json::parse(text);
      ReviewPair p;
      p.id = r.at("id").get<std::string>();
      p.code_tokens = r.at("code_tokens").get<std::vector<std::string>>();
      p.review_tokens = r.at("review_tokens").get<std::vector<std::string>>();
      p.code_chars = r.at("code_chars").get<std::string>();
      p.review_chars = r.at("review_chars").get<std::string>();
      p.label = r.at("label").get<float>();
      if (p.label != 0.0F && p.label != 1.0F) {
        throw DataError(fmt::format("{}:{}: label must be 0 or 1",
                                    path.string(), line));
      }
      pairs.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw DataError(
          fmt::format("{}:{}: malformed pair ({})", path.string(), line, e.what()));
    }
  }
  return pairs;
}

}  // namespace corerev::corpus
