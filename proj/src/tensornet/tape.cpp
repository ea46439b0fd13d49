// SPDX-License-Identifier: Apache-2.0
#include "corerev/tensornet/tape.hpp"

#include <algorithm>

#include <fmt/core.h>

#include "corerev/error.hpp"

namespace corerev::tensornet {

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), nullptr, false, {}});
  return Var{nodes_.size() - 1};
}

Var Tape::record(Tensor value, Backward backward, bool needs_grad) {
  nodes_.push_back(Node{std::move(value), std::move(backward), needs_grad, {}});
  return Var{nodes_.size() - 1};
}

std::span<double> Tape::grad(Var v) {
  Node& n = nodes_.at(v.id);
  if (n.grad.size() != n.value.size()) n.grad.assign(n.value.size(), 0.0);
  return n.grad;
}

double Tape::scalar(Var v) const {
  const Tensor& t = value(v);
  if (t.size() != 1) {
    throw ConfigError(fmt::format("expected a scalar, got shape {}",
                                  shape_string(t.shape())));
  }
  return t[0];
}

void Tape::backward(Var root, double seed) {
  if (value(root).size() != 1) {
    throw ConfigError("backward() needs a scalar root");
  }
  for (Node& n : nodes_) n.grad.clear();
  grad(root)[0] = seed;
  for (std::size_t i = root.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || !n.needs_grad || n.grad.empty()) continue;
    // nodes_ is not resized during backward, so the span stays valid.
    n.backward(*this, std::span<const double>(n.grad));
  }
}

}  // namespace corerev::tensornet
