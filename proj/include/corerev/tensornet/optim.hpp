// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "corerev/tensornet/tensor.hpp"

namespace corerev::tensornet {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t t = 0;
};

// Bias-corrected Adam update of `params` from their grad() buffers. The
// state is sized on first use and must keep seeing the same parameter list.
// learning_rate 0 advances t and the moments but leaves every parameter
// untouched.
void adam_step(const std::vector<Tensor*>& params, AdamState& state, const AdamConfig& config);

}  // namespace corerev::tensornet
