// SPDX-License-Identifier: Apache-2.0
#include "corerev/embed/sgns.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "corerev/binary_io.hpp"
#include "corerev/error.hpp"
#include "corerev/random.hpp"

namespace corerev::embed {

namespace {

float sigmoid(float x) {
  if (x >= 0) return 1.0F / (1.0F + std::exp(-x));
  float e = std::exp(x);
  return e / (1.0F + e);
}

std::size_t count_pairs(const std::vector<std::vector<int>>& corpus,
                        std::size_t window) {
  std::size_t pairs = 0;
  for (const auto& sentence : corpus) {
    std::size_t n = sentence.size();
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t lo = c >= window ? c - window : 0;
      std::size_t hi = std::min(n - 1, c + window);
      pairs += hi - lo;
    }
  }
  return pairs;
}

}  // namespace

std::vector<double> noise_distribution(const std::vector<std::vector<int>>& corpus,
                                       std::size_t vocab_size) {
  std::vector<double> weights(vocab_size, 0.0);
  for (const auto& sentence : corpus) {
    for (int id : sentence) weights[static_cast<std::size_t>(id)] += 1.0;
  }
  weights[kPadId] = 0.0;
  double total = 0.0;
  for (double& w : weights) {
    w = std::pow(w, 0.75);
    total += w;
  }
  if (total > 0) {
    for (double& w : weights) w /= total;
  }
  return weights;
}

WordEmbeddingMatrix sgns_initial_embeddings(std::size_t vocab_size,
                                            const SgnsConfig& config) {
  WordEmbeddingMatrix m(vocab_size, config.dim);
  Rng rng(derive_seed(config.seed, 0));
  double bound = 0.5 / static_cast<double>(config.dim);
  for (std::size_t r = 0; r < vocab_size; ++r) {
    for (float& v : m.row(r)) {
      v = static_cast<float>(uniform_real(rng, -bound, bound));
    }
  }
  std::fill(m.row(kPadId).begin(), m.row(kPadId).end(), 0.0F);
  return m;
}

SgnsResult train_sgns(const std::vector<std::vector<int>>& corpus,
                      std::size_t vocab_size, const SgnsConfig& config) {
  if (config.dim == 0) throw ConfigError("embedding dim must be at least 1");
  if (config.window == 0) throw ConfigError("window must be at least 1");
  if (vocab_size <= static_cast<std::size_t>(kUnkId)) {
    throw ConfigError("vocabulary must contain the reserved ids");
  }
  bool any_token = false;
  for (const auto& sentence : corpus) {
    for (int id : sentence) {
      if (id < 0 || static_cast<std::size_t>(id) >= vocab_size) {
        throw ConfigError(fmt::format("token id {} outside vocabulary of {}", id,
                                      vocab_size));
      }
      any_token = true;
    }
  }
  if (!any_token) throw DataError("cannot train embeddings on an empty corpus");

  const std::size_t dim = config.dim;
  SgnsResult result{sgns_initial_embeddings(vocab_size, config),
                    WordEmbeddingMatrix(vocab_size, dim)};
  std::vector<double> noise = noise_distribution(corpus, vocab_size);
  std::vector<double> cdf(vocab_size);
  double acc = 0.0;
  for (std::size_t i = 0; i < vocab_size; ++i) {
    acc += noise[i];
    cdf[i] = acc;
  }
  auto draw_noise = [&](Rng& rng) {
    double u = uniform_unit(rng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<int>(std::min<std::size_t>(
        static_cast<std::size_t>(it - cdf.begin()), vocab_size - 1));
  };

  const std::size_t total_pairs = count_pairs(corpus, config.window) * config.epochs;
  std::size_t seen = 0;
  Rng rng(derive_seed(config.seed, 1));
  std::vector<float> grad(dim);

  auto update = [&](std::span<float> center, std::span<float> ctx, float label,
                    float lr) {
    float dot = 0.0F;
    for (std::size_t k = 0; k < dim; ++k) dot += center[k] * ctx[k];
    float g = lr * (label - sigmoid(dot));
    for (std::size_t k = 0; k < dim; ++k) {
      grad[k] += g * ctx[k];
      ctx[k] += g * center[k];
    }
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& sentence : corpus) {
      const std::size_t n = sentence.size();
      for (std::size_t c = 0; c < n; ++c) {
        std::size_t lo = c >= config.window ? c - config.window : 0;
        std::size_t hi = std::min(n - 1, c + config.window);
        auto center_id = static_cast<std::size_t>(sentence[c]);
        for (std::size_t o = lo; o <= hi; ++o) {
          if (o == c) continue;
          double progress = total_pairs > 0
                                ? static_cast<double>(seen) / static_cast<double>(total_pairs)
                                : 0.0;
          auto lr = static_cast<float>(
              config.learning_rate * std::max(1e-4, 1.0 - progress));
          ++seen;
          auto context_id = sentence[o];
          std::fill(grad.begin(), grad.end(), 0.0F);
          std::span<float> center = result.embeddings.row(center_id);
          update(center, result.context.row(static_cast<std::size_t>(context_id)),
                 1.0F, lr);
          for (std::size_t k = 0; k < config.negatives; ++k) {
            int neg = draw_noise(rng);
            if (neg == context_id) continue;
            update(center, result.context.row(static_cast<std::size_t>(neg)), 0.0F,
                   lr);
          }
          if (center_id != static_cast<std::size_t>(kPadId)) {
            for (std::size_t k = 0; k < dim; ++k) center[k] += grad[k];
          }
        }
      }
    }
  }
  return result;
}

void save_embeddings(const std::filesystem::path& path,
                     const WordEmbeddingMatrix& matrix, const Vocab& vocab) {
  if (matrix.rows != vocab.size()) {
    throw ConfigError(fmt::format("embedding rows {} != vocabulary size {}",
                                  matrix.rows, vocab.size()));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  nlohmann::json header = {{"format", "corerev-embeddings"},
                           {"version", kEmbeddingFormatVersion},
                           {"vocab_size", matrix.rows},
                           {"dim", matrix.dim}};
  out << header.dump() << '\n';
  write_f32_le(out, matrix.data);
  out.close();
  std::filesystem::path vocab_path = path;
  vocab_path += ".vocab";
  save_vocab(vocab_path, vocab);
}

LoadedEmbeddings load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw DataError(fmt::format("{}: missing header", path.string()));
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception&) {
    throw DataError(fmt::format("{}: invalid header", path.string()));
  }
  if (header.value("format", "") != "corerev-embeddings" ||
      header.value("version", 0) != kEmbeddingFormatVersion) {
    throw DataError(fmt::format("{}: unsupported embedding format/version",
                                path.string()));
  }
  auto rows = header.at("vocab_size").get<std::size_t>();
  auto dim = header.at("dim").get<std::size_t>();
  LoadedEmbeddings loaded;
  loaded.matrix = WordEmbeddingMatrix(rows, dim);
  if (!read_f32_le(in, loaded.matrix.data) || in.peek() != EOF) {
    throw DataError(fmt::format("{}: payload size does not match header",
                                path.string()));
  }
  std::filesystem::path vocab_path = path;
  vocab_path += ".vocab";
  loaded.vocab = load_vocab(vocab_path);
  if (loaded.vocab.size() != rows) {
    throw DataError(fmt::format("{}: vocabulary has {} entries, matrix {} rows",
                                path.string(), loaded.vocab.size(), rows));
  }
  return loaded;
}

}  // namespace corerev::embed
