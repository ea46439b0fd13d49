// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "corerev/random.hpp"
#include "corerev/tensornet/tape.hpp"
#include "corerev/tensornet/tensor.hpp"

namespace corerev::tensornet {

// Numerically guarded softmax (max subtracted first). Entries at index
// >= `length` are treated as masked (-inf) and get weight exactly 0.
// length 0 is rejected.
std::vector<double> softmax(std::span<const double> logits);
std::vector<double> masked_softmax(std::span<const double> logits, std::size_t length);

double sigmoid(double x);

// Rows of `table` picked by `ids`, shape [ids.size(), table.cols()]. With
// `trainable` the backward pass adds into table.grad(), skipping row
// `frozen_row` (the padding row) when it is set.
Var embedding_lookup(Tape& tape, Tensor& table, std::span<const int> ids,
                     bool trainable, int frozen_row = -1);

// One-hot rows, shape [ids.size(), width]; a constant.
Var one_hot(Tape& tape, std::span<const int> ids, std::size_t width);

// Column-wise concatenation of two matrices with the same row count.
Var hconcat(Tape& tape, Var a, Var b);
// Concatenation of vectors (any rank is flattened).
Var concat(Tape& tape, const std::vector<Var>& parts);
// Element-wise product of equally sized values.
Var mul(Tape& tape, Var a, Var b);

// tanh(W x + b) with W [out, in], b [out], x [in].
Var dense_tanh(Tape& tape, Tensor& weight, Tensor& bias, Var x);

// Inverted dropout: each unit kept with probability 1 - rate and scaled by
// 1 / (1 - rate). Returns `x` itself when not training or rate is 0.
// rate outside [0, 1) is rejected.
Var dropout(Tape& tape, Var x, double rate, Rng& rng, bool training);

// (1/N) sum (label - pred)^2 as a one-element value.
Var mse_loss(Tape& tape, Var pred, std::span<const double> label);

}  // namespace corerev::tensornet
