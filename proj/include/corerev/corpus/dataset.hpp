// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace corerev::corpus {

// One collected <code change, review> record as it appears in a dataset file.
struct RawPair {
  std::string id;
  std::string project;
  std::string code_change;  // raw diff hunk text
  std::string review;       // raw reviewer comment

  bool operator==(const RawPair&) const = default;
};

// Head-truncation limits applied during preprocessing.
struct TrimLimits {
  std::size_t code_tokens = 100;
  std::size_t review_tokens = 50;
  std::size_t chars = 300;
};

// A preprocessed training/evaluation example. The character channels are
// stored as text (tokens joined by single spaces, then truncated); they are
// turned into alphabet ids by embed::CharAlphabet::encode once an alphabet exists.
struct ReviewPair {
  std::string id;
  std::vector<std::string> code_tokens;
  std::vector<std::string> review_tokens;
  std::string code_chars;
  std::string review_chars;
  float label = 1.0F;

  bool operator==(const ReviewPair&) const = default;
};

struct DatasetSplit {
  std::vector<ReviewPair> train;
  std::vector<ReviewPair> valid;
  std::vector<ReviewPair> test;
  std::uint64_t seed = 0;
};

struct SplitRatios {
  double train = 7.0;
  double valid = 0.5;
  double test = 2.5;
};

struct IngestOptions {
  // Reviews whose byte-level ASCII ratio falls below this are treated as
  // non-English and skipped.
  double min_ascii_ratio = 0.9;
};

// Parses a JSONL dataset (fields id, project, code_change, review). Records
// flagged as replies by the pull-request author (`"author_reply": true`, or
// equal `review_author` / `pr_author` fields) are skipped, as are records
// failing the ASCII heuristic or with blank code/review. Throws DataError
// naming the 1-based line for malformed lines, missing fields and duplicate
// ids.
std::vector<RawPair> load_dataset(const std::filesystem::path& path,
                                  const IngestOptions& options = {});
std::vector<RawPair> parse_dataset(const std::string& jsonl,
                                   const IngestOptions& options = {});

// Drops records whose (code_change, review) content repeats an earlier one.
std::vector<RawPair> deduplicate(std::vector<RawPair> pairs);

// Lexes the code change, normalizes the review, applies trim limits.
// The result is a positive (label 1.0).
ReviewPair preprocess(const RawPair& raw, const TrimLimits& limits = {});

// Partition sizes floor(n * r / sum(r)) for valid and test; the remainder
// goes to train.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios);

// Seeded Fisher-Yates shuffle followed by slicing into train/valid/test.
// Rejects non-positive ratios, fewer pairs than partitions and duplicate ids.
DatasetSplit split_dataset(const std::vector<RawPair>& pairs,
                           const SplitRatios& ratios, std::uint64_t seed,
                           const TrimLimits& limits = {});

// For each positive emits m negatives <c_i, r_j> with r_j drawn without
// replacement from the distinct reviews of the same partition, never equal
// to r_i. Rejects m < 1, non-positive inputs and m larger than the number of
// distinct reviews available to some positive.
std::vector<ReviewPair> sample_negatives(const std::vector<ReviewPair>& positives,
                                         std::size_t m, std::uint64_t seed);

// ReviewPair JSONL used between pipeline stages.
void save_pairs(const std::filesystem::path& path,
                const std::vector<ReviewPair>& pairs);
std::vector<ReviewPair> load_pairs(const std::filesystem::path& path);

}  // namespace corerev::corpus
