// SPDX-License-Identifier: Apache-2.0
#include "corerev/rankeval/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/core.h>

#include "corerev/error.hpp"

namespace corerev::rankeval {

TfidfTable TfidfTable::fit(const std::vector<std::vector<std::string>>& docs) {
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    std::set<std::string> seen(doc.begin(), doc.end());
    for (const auto& t : seen) ++df[t];
  }
  if (df.empty()) throw DataError("TF-IDF vocabulary is empty");
  TfidfTable table;
  table.documents_ = docs.size();
  const auto n = static_cast<double>(docs.size());
  for (const auto& [term, count] : df) {
    table.index_.emplace(term, table.idf_.size());
    table.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return table;
}

std::optional<std::size_t> TfidfTable::index(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double TfidfTable::idf(std::string_view term) const {
  auto i = index(term);
  if (!i) throw ConfigError(fmt::format("term '{}' not in TF-IDF table", term));
  return idf_[*i];
}

SparseVector TfidfTable::vectorize(const std::vector<std::string>& doc) const {
  std::map<std::size_t, double> counts;
  for (const auto& t : doc) {
    if (auto i = index(t)) counts[*i] += 1.0;
  }
  SparseVector v;
  double norm = 0.0;
  for (const auto& [i, tf] : counts) {
    double w = tf * idf_[i];
    v.emplace_back(i, w);
    norm += w * w;
  }
  if (norm > 0) {
    norm = std::sqrt(norm);
    for (auto& e : v) e.second /= norm;
  }
  return v;
}

SparseVector concat_features(const SparseVector& a, std::size_t a_dim, const SparseVector& b) {
  SparseVector out = a;
  for (const auto& [i, v] : b) out.emplace_back(a_dim + i, v);
  return out;
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double linear(const LogRegModel& m, const SparseVector& x) {
  double z = m.b;
  for (const auto& [i, v] : x) {
    if (i < m.w.size()) z += m.w[i] * v;
  }
  return z;
}

}  // namespace

LogRegModel train_logreg(const std::vector<SparseVector>& features, const std::vector<double>& labels,
                         std::size_t dim, const LogRegConfig& config) {
  if (features.size() != labels.size()) throw ConfigError("features and labels differ in size");
  if (features.empty()) throw DataError("no examples to train on");
  LogRegModel m{std::vector<double>(dim, 0.0), 0.0};
  const auto n = static_cast<double>(features.size());
  std::vector<double> gw(dim);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t k = 0; k < features.size(); ++k) {
      double err = sigmoid(linear(m, features[k])) - labels[k];
      for (const auto& [i, v] : features[k]) {
        if (i >= dim) throw ConfigError(fmt::format("feature index {} beyond dim {}", i, dim));
        gw[i] += err * v;
      }
      gb += err;
    }
    for (std::size_t i = 0; i < dim; ++i) m.w[i] -= config.learning_rate * gw[i] / n;
    m.b -= config.learning_rate * gb / n;
  }
  return m;
}

double score_logreg(const LogRegModel& model, const SparseVector& x) {
  return sigmoid(linear(model, x));
}

double logreg_accuracy(const LogRegModel& model, const std::vector<SparseVector>& features,
                       const std::vector<double>& labels) {
  if (features.empty()) throw ConfigError("no examples");
  std::size_t right = 0;
  for (std::size_t k = 0; k < features.size(); ++k) {
    bool predicted = score_logreg(model, features[k]) >= 0.5;
    if (predicted == (labels[k] >= 0.5)) ++right;
  }
  return static_cast<double>(right) / static_cast<double>(features.size());
}

TfidfBaseline TfidfBaseline::train(const std::vector<corpus::ReviewPair>& examples,
                                   const LogRegConfig& config) {
  std::vector<std::vector<std::string>> code, review;
  for (const auto& p : examples) {
    code.push_back(p.code_tokens);
    review.push_back(p.review_tokens);
  }
  TfidfBaseline b;
  b.code_ = TfidfTable::fit(code);
  b.review_ = TfidfTable::fit(review);
  std::vector<SparseVector> x;
  std::vector<double> y;
  for (const auto& p : examples) {
    x.push_back(b.features(p.code_tokens, p.review_tokens));
    y.push_back(static_cast<double>(p.label));
  }
  b.model_ = train_logreg(x, y, b.code_.size() + b.review_.size(), config);
  return b;
}

SparseVector TfidfBaseline::features(const std::vector<std::string>& code,
                                     const std::vector<std::string>& review) const {
  return concat_features(code_.vectorize(code), code_.size(), review_.vectorize(review));
}

double TfidfBaseline::score(const std::vector<std::string>& code,
                            const std::vector<std::string>& review) const {
  return score_logreg(model_, features(code, review));
}

}  // namespace corerev::rankeval
