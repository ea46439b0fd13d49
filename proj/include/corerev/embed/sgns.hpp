// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "corerev/embed/vocab.hpp"

namespace corerev::embed {

// Row-major |vocab| x dim float32 matrix. Row kPadId is kept at zero.
struct WordEmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<float> data;

  WordEmbeddingMatrix() = default;
  WordEmbeddingMatrix(std::size_t r, std::size_t d)
      : rows(r), dim(d), data(r * d, 0.0F) {}

  std::span<float> row(std::size_t i) { return {data.data() + i * dim, dim}; }
  std::span<const float> row(std::size_t i) const {
    return {data.data() + i * dim, dim};
  }
  bool operator==(const WordEmbeddingMatrix&) const = default;
};

struct SgnsConfig {
  std::size_t dim = 300;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;  // decays linearly to 1e-4 of this value
  std::uint64_t seed = 1;
};

struct SgnsResult {
  WordEmbeddingMatrix embeddings;  // center ("input") vectors
  WordEmbeddingMatrix context;     // context ("output") vectors
};

// Skip-gram with negative sampling. Every (center, context) pair within
// `window` positions is trained against `negatives` noise words drawn from
// the unigram distribution raised to 0.75. Center vectors start uniform in
// (-0.5/dim, 0.5/dim) and context vectors at zero. Deterministic per seed.
// Rejects dim or window of zero, an empty corpus and out-of-range ids.
SgnsResult train_sgns(const std::vector<std::vector<int>>& corpus,
                      std::size_t vocab_size, const SgnsConfig& config);

// The initialization train_sgns starts from, exposed for tests.
WordEmbeddingMatrix sgns_initial_embeddings(std::size_t vocab_size,
                                            const SgnsConfig& config);

// Unigram^0.75 noise distribution over ids (probabilities sum to 1).
std::vector<double> noise_distribution(const std::vector<std::vector<int>>& corpus,
                                       std::size_t vocab_size);

// Embedding file: one ASCII JSON header line
// {"format":"corerev-embeddings","version":1,"vocab_size":V,"dim":d}
// followed by V*d little-endian float32 values, row-major. The vocabulary
// is written beside it as `<path>.vocab`, one token per line in id order.
inline constexpr int kEmbeddingFormatVersion = 1;

void save_embeddings(const std::filesystem::path& path,
                     const WordEmbeddingMatrix& matrix, const Vocab& vocab);

struct LoadedEmbeddings {
  WordEmbeddingMatrix matrix;
  Vocab vocab;
};
LoadedEmbeddings load_embeddings(const std::filesystem::path& path);

}  // namespace corerev::embed
