// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "corerev/random.hpp"
#include "corerev/tensornet/tape.hpp"
#include "corerev/tensornet/tensor.hpp"

namespace corerev::tensornet {

// Gate blocks are stacked in the order input, forget, output, candidate:
// rows [0,H) of W/U/b belong to i, [H,2H) to f, [2H,3H) to o, [3H,4H) to g.
enum class Gate : std::size_t { input = 0, forget = 1, output = 2, candidate = 3 };

struct LstmCellParams {
  std::size_t input_dim = 0;
  std::size_t hidden_size = 0;
  Tensor W;  // [4H, input_dim]
  Tensor U;  // [4H, H]
  Tensor b;  // [4H]

  LstmCellParams() = default;
  LstmCellParams(std::size_t input_dim, std::size_t hidden_size);

  // Uniform(-scale, scale) weights, zero biases, forget bias 1.0.
  void initialize(Rng& rng, double scale = 0.05);
  // Block of one gate in the stacked bias, e.g. the forget biases.
  std::span<double> gate_bias(Gate gate);
};

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;
};

// One step of the gated cell, evaluated directly (no tape).
LstmState lstm_step(std::span<const double> x, std::span<const double> h_prev,
                    std::span<const double> c_prev, const LstmCellParams& params);

// Runs the cell over rows [0, length) of x ([T, input_dim]); rows at or
// past `length` are padding. Output [T, H]: row t is the hidden state after
// consuming x[t]; padded rows are zero. `reverse` processes length-1 .. 0.
Var lstm_sequence(Tape& tape, Var x, LstmCellParams& params, std::size_t length,
                  bool reverse);

struct BiLstmOutput {
  Var states;  // [T, 2H], row t = [fwd_h_t ; bwd_h_t]
  Var last;    // [2H] = [fwd_h at length-1 ; bwd_h at 0]
};

// length must be in [1, T]; an empty sequence is rejected.
BiLstmOutput bilstm_encode(Tape& tape, Var x, LstmCellParams& fwd, LstmCellParams& bwd,
                           std::size_t length);

struct AttentionParams {
  std::size_t input_dim = 0;
  std::size_t attn_dim = 0;
  Tensor Ws;  // [attn_dim, input_dim]
  Tensor b;   // [attn_dim]
  Tensor v;   // [attn_dim]

  AttentionParams() = default;
  AttentionParams(std::size_t input_dim, std::size_t attn_dim);
  void initialize(Rng& rng, double scale = 0.05);
};

// e_t = v . tanh(Ws H[t] + b) for t < length, -inf beyond; alpha =
// softmax(e); returns sum_t alpha_t H[t]. length 0 is rejected.
Var attention_pool(Tape& tape, Var states, AttentionParams& params, std::size_t length);

// The attention weights attention_pool would use, for inspection.
std::vector<double> attention_weights(const Tensor& states, const AttentionParams& params,
                                      std::size_t length);

// [fwd_h at length-1 ; bwd_h at 0] picked from a [T, 2H] state matrix.
Var bilstm_last(Tape& tape, Var states, std::size_t length);

// Fills every value uniformly in (-scale, scale).
void uniform_fill(Tensor& t, Rng& rng, double scale);

}  // namespace corerev::tensornet
