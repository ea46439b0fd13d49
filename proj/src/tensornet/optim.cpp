// SPDX-License-Identifier: Apache-2.0
#include "corerev/tensornet/optim.hpp"

#include <cmath>

#include <fmt/core.h>

#include "corerev/error.hpp"

namespace corerev::tensornet {

void adam_step(const std::vector<Tensor*>& params, AdamState& state, const AdamConfig& cfg) {
  if (cfg.learning_rate < 0) throw ConfigError("learning rate must be non-negative");
  if (state.m.empty()) {
    for (const Tensor* p : params) {
      state.m.emplace_back(p->size(), 0.0);
      state.v.emplace_back(p->size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) {
    throw ConfigError(fmt::format("optimizer state for {} params, got {}", state.m.size(),
                                  params.size()));
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    if (state.m[i].size() != p.size()) {
      throw ConfigError(fmt::format("optimizer state mismatch for param {}", i));
    }
    auto g = p.grad();
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
      v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
    }
    if (cfg.learning_rate == 0.0) continue;
    for (std::size_t k = 0; k < p.size(); ++k) {
      double mhat = m[k] / c1;
      double vhat = v[k] / c2;
      p[k] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
  }
}

}  // namespace corerev::tensornet
