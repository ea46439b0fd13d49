// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "corerev/tensornet/tensor.hpp"

namespace corerev::tensornet {

// Handle to a value recorded on a Tape.
struct Var {
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t id = kNone;
  bool valid() const { return id != kNone; }
};

// Reverse-mode tape for a single example. Ops append nodes in evaluation
// order; backward() walks them in reverse. Trainable weights are not nodes:
// ops hold a reference to the weight Tensor and add into its grad() buffer,
// so a batch accumulates across tapes until the caller zeroes the grads.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::span<const double> out_grad)>;

  Var constant(Tensor value);
  // For op implementations. `needs_grad` false marks values no gradient
  // has to flow into (constants and anything computed only from them).
  Var record(Tensor value, Backward backward, bool needs_grad = true);

  const Tensor& value(Var v) const { return nodes_.at(v.id).value; }
  bool needs_grad(Var v) const { return nodes_.at(v.id).needs_grad; }
  // Gradient buffer of a node; only valid during backward().
  std::span<double> grad(Var v);
  double scalar(Var v) const;

  // Seeds d(root) = seed (root must hold one value) and propagates.
  void backward(Var root, double seed = 1.0);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Backward backward;
    bool needs_grad = false;
    std::vector<double> grad;
  };
  std::vector<Node> nodes_;
};

}  // namespace corerev::tensornet
