// SPDX-License-Identifier: Apache-2.0
#include "synthetic.hpp"

#include <set>

#include <fmt/core.h>

#include "corerev/random.hpp"

namespace corerev::testsupport {

namespace {

const std::vector<std::string> kCodeWords = {
    "int",   "final", "return", "value", "count", "size", "index", "buffer", "name",
    "list",  "map",   "get",    "set",   "add",   "remove", "null", "this",  "new",
    "String", "result", "key",  "item",  "data",  "offset", "length", "flag", "==",
    "+",     "0",     "1"};

const std::vector<std::string> kReviewWords = {
    "please", "rename", "this", "variable", "method", "maybe", "consider", "use", "a",
    "constant", "here", "why", "not", "check", "null", "first", "move", "into", "helper",
    "nit", "typo", "missing", "test", "for", "case", "should", "be", "final", "simplify",
    "loop"};

std::string pick(const std::vector<std::string>& words, Rng& rng) {
  return words[uniform_index(rng, words.size())];
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::vector<std::string> made_up_words(std::size_t n, Rng& rng) {
  static const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
  static const char* kVowels[] = {"a", "e", "i", "o", "u"};
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string w;
    for (int k = 0; k < 3; ++k) {
      w += kOnsets[uniform_index(rng, std::size(kOnsets))];
      w += kVowels[uniform_index(rng, std::size(kVowels))];
    }
    if (seen.insert(w).second) out.push_back(w);
  }
  return out;
}

}  // namespace

std::vector<corpus::RawPair> random_pairs(std::size_t n, std::uint64_t seed,
                                          std::size_t max_code_tokens,
                                          std::size_t max_review_words, std::size_t vocabulary) {
  Rng rng(seed);
  std::vector<std::string> code_words = kCodeWords, review_words = kReviewWords;
  if (vocabulary > 0) {
    code_words = made_up_words(vocabulary, rng);
    review_words = made_up_words(vocabulary, rng);
  }
  std::vector<corpus::RawPair> out;
  std::set<std::string> codes, reviews;
  while (out.size() < n) {
    std::vector<std::string> code, review;
    std::size_t nc = 2 + uniform_index(rng, max_code_tokens - 1);
    std::size_t nr = 2 + uniform_index(rng, max_review_words - 1);
    for (std::size_t k = 0; k < nc; ++k) code.push_back(pick(code_words, rng));
    for (std::size_t k = 0; k < nr; ++k) review.push_back(pick(review_words, rng));
    std::string c = "+" + join(code), r = join(review);
    if (!codes.insert(c).second || !reviews.insert(r).second) continue;
    out.push_back({fmt::format("p{}", out.size()), "synthetic", c, r});
  }
  return out;
}

std::vector<corpus::RawPair> joint_cue_corpus(const JointCueOptions& o) {
  static const std::vector<std::string> kMorphemes = {"buf", "conn", "node", "lock", "path",
                                                      "tick", "peer", "slot", "row", "job",
                                                      "mesh", "sink"};
  static const std::vector<std::string> kKeywords = {"alpha", "bravo", "delta", "kilo",
                                                     "lima",  "oscar", "tango", "zulu",
                                                     "mike",  "romeo", "sierra", "papa"};
  Rng rng(o.seed);
  std::vector<corpus::RawPair> out;
  std::set<std::string> seen;
  const std::string upper = "ABCDEFGHJKLMNPQRSTUVWXYZ";
  const std::string lower = "bcdfghjkmnpqrstvwxz";
  while (out.size() < o.pairs) {
    const std::string& morph = kMorphemes[uniform_index(rng, std::min(o.morphemes, kMorphemes.size()))];
    const std::string& kw = kKeywords[uniform_index(rng, std::min(o.keywords, kKeywords.size()))];
    std::string ident = morph;
    ident += upper[uniform_index(rng, upper.size())];
    ident += lower[uniform_index(rng, lower.size())];
    ident += lower[uniform_index(rng, lower.size())];
    if (!seen.insert(ident).second) continue;
    std::vector<std::string> code{ident}, review{ident};
    for (std::size_t k = 0; k < o.filler; ++k) code.push_back(pick(kCodeWords, rng));
    for (std::size_t k = 0; k < o.filler; ++k) review.push_back(pick(kReviewWords, rng));
    code.push_back(kw);
    review.push_back(kw);
    out.push_back({fmt::format("j{}", out.size()), "synthetic", "+" + join(code), join(review)});
  }
  return out;
}

MarkerSet marker_set(std::size_t train_pairs, std::size_t test_pairs, std::size_t bank,
                     std::uint64_t seed, bool shuffle_labels) {
  Rng rng(seed);
  auto code = [&] {
    std::vector<std::string> c;
    for (int k = 0; k < 5; ++k) c.push_back(pick(kCodeWords, rng));
    return c;
  };
  std::set<std::vector<std::string>> used;
  auto review = [&](bool marker) {
    while (true) {
      std::vector<std::string> r;
      for (int k = 0; k < 5; ++k) r.push_back(pick(kReviewWords, rng));
      if (marker) r.insert(r.begin() + static_cast<long>(uniform_index(rng, r.size() + 1)), "lgtm");
      if (used.insert(r).second) return r;
    }
  };
  auto make = [](std::string id, std::vector<std::string> c, std::vector<std::string> r,
                 float label) {
    corpus::ReviewPair p;
    p.id = std::move(id);
    p.code_tokens = std::move(c);
    p.review_tokens = std::move(r);
    p.code_chars = join(p.code_tokens);
    p.review_chars = join(p.review_tokens);
    p.label = label;
    return p;
  };
  MarkerSet set;
  for (std::size_t i = 0; i < train_pairs; ++i) {
    auto c = code();
    set.train.push_back(make(fmt::format("t{}", i), c, review(true), 1.0F));
    set.train.push_back(make(fmt::format("t{}#neg", i), c, review(false), 0.0F));
  }
  if (shuffle_labels) {
    std::vector<float> labels;
    for (const auto& p : set.train) labels.push_back(p.label);
    shuffle(labels, rng);
    for (std::size_t i = 0; i < labels.size(); ++i) set.train[i].label = labels[i];
  }
  for (std::size_t i = 0; i < test_pairs; ++i) {
    set.test_queries.push_back(make(fmt::format("q{}", i), code(), review(true), 1.0F));
  }
  for (std::size_t i = 0; i < bank; ++i) {
    set.bank.push_back(make(fmt::format("b{}", i), code(), review(false), 1.0F));
  }
  return set;
}

std::vector<corpus::ReviewPair> preprocess_all(const std::vector<corpus::RawPair>& raw,
                                               const corpus::TrimLimits& limits) {
  std::vector<corpus::ReviewPair> out;
  for (const auto& r : raw) out.push_back(corpus::preprocess(r, limits));
  return out;
}

}  // namespace corerev::testsupport
