// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "corerev/corpus/dataset.hpp"

namespace corerev::rankeval {

// (index, value) entries sorted by index.
using SparseVector = std::vector<std::pair<std::size_t, double>>;

// Term weights fitted on a corpus: tf is the raw count in the document and
// idf(t) = ln((1 + N) / (1 + df(t))) + 1. Vectors are L2-normalized; terms
// unseen at fit time are dropped.
class TfidfTable {
 public:
  // Rejects a corpus without a single term.
  static TfidfTable fit(const std::vector<std::vector<std::string>>& docs);

  std::size_t size() const { return idf_.size(); }
  std::size_t documents() const { return documents_; }
  std::optional<std::size_t> index(std::string_view term) const;
  // idf of a known term; unknown terms throw ConfigError.
  double idf(std::string_view term) const;
  SparseVector vectorize(const std::vector<std::string>& doc) const;

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> idf_;
  std::size_t documents_ = 0;
};

// [a ; b] with b's indices shifted by a_dim.
SparseVector concat_features(const SparseVector& a, std::size_t a_dim, const SparseVector& b);

struct LogRegModel {
  std::vector<double> w;
  double b = 0.0;
};

struct LogRegConfig {
  // Features are two unit vectors plus a bias, so the log-loss gradient is
  // 0.75-Lipschitz and any step below 2/0.75 descends.
  double learning_rate = 2.0;
  std::size_t epochs = 200;
};

// Full-batch gradient descent on the mean log-loss from zero weights.
LogRegModel train_logreg(const std::vector<SparseVector>& features, const std::vector<double>& labels,
                         std::size_t dim, const LogRegConfig& config = {});
// sigma(w . x + b).
double score_logreg(const LogRegModel& model, const SparseVector& x);
double logreg_accuracy(const LogRegModel& model, const std::vector<SparseVector>& features,
                       const std::vector<double>& labels);

// TF-IDF + logistic regression relevancy: code and review get their own
// tables and the pair feature is their concatenation.
class TfidfBaseline {
 public:
  static TfidfBaseline train(const std::vector<corpus::ReviewPair>& examples,
                             const LogRegConfig& config = {});
  SparseVector features(const std::vector<std::string>& code,
                        const std::vector<std::string>& review) const;
  double score(const std::vector<std::string>& code, const std::vector<std::string>& review) const;
  const LogRegModel& model() const { return model_; }

 private:
  TfidfTable code_;
  TfidfTable review_;
  LogRegModel model_;
};

}  // namespace corerev::rankeval
