// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "corerev/tensornet/tape.hpp"
#include "corerev/tensornet/tensor.hpp"

namespace corerev::tensornet {

struct NamedTensor {
  std::string name;
  Tensor* tensor;
};

struct GradcheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::string worst;  // "name[index]" of the largest error
  double analytic = 0.0;
  double numeric = 0.0;
};

// Compares the tape gradient of a scalar loss with central differences
// (f(p+eps) - f(p-eps)) / 2eps for every entry of every tensor, or for at
// most `max_entries` entries per tensor spread evenly over it. The loss
// must be a deterministic function of the tensors. Relative error is
// |a - n| / max(|a|, |n|, floor).
GradcheckResult gradcheck(const std::function<Var(Tape&)>& loss,
                          const std::vector<NamedTensor>& tensors, double eps = 1e-5,
                          std::size_t max_entries = 0, double floor = 1e-6);

}  // namespace corerev::tensornet
