// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "corerev/model/config.hpp"
#include "corerev/tensornet/gradcheck.hpp"

namespace corerev::model {

struct GroupGradcheck {
  std::string group;  // parameter array name, e.g. "code.word.fwd.W"
  tensornet::GradcheckResult result;
};

struct ModelGradcheck {
  std::uint64_t seed = 0;
  std::vector<GroupGradcheck> groups;
  double max_rel_error = 0.0;
  std::string worst;
  bool passed(double tolerance) const { return max_rel_error < tolerance; }
};

struct GradcheckSetup {
  std::size_t pairs = 2;
  std::size_t max_length = 6;  // steps per sequence, words and chars alike
  std::size_t vocab = 9;       // word ids per side, PAD and UNK included
  double weight_scale = 0.5;   // large enough that no gate path is ~0
  double eps = 1e-5;
  std::size_t max_entries = 0;  // per array, 0 = every entry
};

// End-to-end check of the summed MSE loss of a few random pairs against
// central differences, over every parameter array with the embeddings
// trainable. Dropout is off so the loss is a deterministic function.
ModelGradcheck check_model_gradients(ModelConfig config, std::uint64_t seed,
                                     const GradcheckSetup& setup = {});

nlohmann::json to_json(const ModelGradcheck& r);

}  // namespace corerev::model
