// SPDX-License-Identifier: Apache-2.0
#include "corerev/tensornet/layers.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include <Eigen/Dense>
#include <fmt/core.h>

#include "corerev/error.hpp"
#include "corerev/tensornet/ops.hpp"

namespace corerev::tensornet {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using CMatMap = Eigen::Map<const RowMat>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using CVecMap = Eigen::Map<const Eigen::VectorXd>;

CMatMap as_matrix(const Tensor& t) {
  return {t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())};
}
MatMap as_matrix(std::span<double> data, std::size_t rows, std::size_t cols) {
  return {data.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

// Gates and cell state for one cell evaluation. z holds pre-activations
// on input and the activated [i f o g] values on output.
void activate_gates(Eigen::Ref<Eigen::VectorXd> z, std::size_t H) {
  const auto h = static_cast<Eigen::Index>(H);
  for (Eigen::Index k = 0; k < 3 * h; ++k) z[k] = sigmoid(z[k]);
  for (Eigen::Index k = 3 * h; k < 4 * h; ++k) z[k] = std::tanh(z[k]);
}

}  // namespace

void uniform_fill(Tensor& t, Rng& rng, double scale) {
  for (double& v : t.values()) v = uniform_real(rng, -scale, scale);
}

LstmCellParams::LstmCellParams(std::size_t in, std::size_t hidden)
    : input_dim(in),
      hidden_size(hidden),
      W(Tensor::matrix(4 * hidden, in)),
      U(Tensor::matrix(4 * hidden, hidden)),
      b(Tensor({4 * hidden})) {
  if (in == 0 || hidden == 0) throw ConfigError("LSTM dims must be at least 1");
  auto fb = gate_bias(Gate::forget);
  std::fill(fb.begin(), fb.end(), 1.0);
}

void LstmCellParams::initialize(Rng& rng, double scale) {
  uniform_fill(W, rng, scale);
  uniform_fill(U, rng, scale);
  b.fill(0.0);
  auto fb = gate_bias(Gate::forget);
  std::fill(fb.begin(), fb.end(), 1.0);
}

std::span<double> LstmCellParams::gate_bias(Gate gate) {
  return b.values().subspan(static_cast<std::size_t>(gate) * hidden_size, hidden_size);
}

LstmState lstm_step(std::span<const double> x, std::span<const double> h_prev,
                    std::span<const double> c_prev, const LstmCellParams& p) {
  const std::size_t H = p.hidden_size;
  if (x.size() != p.input_dim || h_prev.size() != H || c_prev.size() != H ||
      p.W.rows() != 4 * H || p.W.cols() != p.input_dim || p.U.rows() != 4 * H ||
      p.U.cols() != H || p.b.size() != 4 * H) {
    throw ConfigError(fmt::format("lstm_step shape mismatch: x {} h {} c {} for ({}, {})",
                                  x.size(), h_prev.size(), c_prev.size(), p.input_dim, H));
  }
  Eigen::VectorXd z = as_matrix(p.W) * CVecMap(x.data(), static_cast<Eigen::Index>(x.size())) +
                      as_matrix(p.U) * CVecMap(h_prev.data(), static_cast<Eigen::Index>(H)) +
                      CVecMap(p.b.data(), static_cast<Eigen::Index>(4 * H));
  activate_gates(z, H);
  LstmState s{std::vector<double>(H), std::vector<double>(H)};
  for (std::size_t k = 0; k < H; ++k) {
    double i = z[static_cast<Eigen::Index>(k)];
    double f = z[static_cast<Eigen::Index>(H + k)];
    double o = z[static_cast<Eigen::Index>(2 * H + k)];
    double g = z[static_cast<Eigen::Index>(3 * H + k)];
    s.c[k] = f * c_prev[k] + i * g;
    s.h[k] = o * std::tanh(s.c[k]);
  }
  return s;
}

Var lstm_sequence(Tape& tape, Var x, LstmCellParams& p, std::size_t length, bool reverse) {
  const Tensor& vx = tape.value(x);
  const std::size_t T = vx.rows(), H = p.hidden_size, in = p.input_dim;
  if (vx.rank() != 2 || vx.cols() != in) {
    throw ConfigError(fmt::format("lstm input {} does not match input dim {}",
                                  shape_string(vx.shape()), in));
  }
  if (length == 0 || length > T) {
    throw ConfigError(fmt::format("lstm length {} for {} rows", length, T));
  }
  const auto L = static_cast<Eigen::Index>(length);
  const auto h4 = static_cast<Eigen::Index>(4 * H);
  const auto h1 = static_cast<Eigen::Index>(H);

  struct Saved {
    RowMat gates;   // [L, 4H] activated, indexed by position
    RowMat cells;   // [L, H]
    RowMat h_prev;  // [L, H] state fed into the step at that position
    RowMat c_prev;
  };
  auto saved = std::make_shared<Saved>();
  CMatMap X = as_matrix(vx);
  CMatMap W = as_matrix(p.W);
  CMatMap U = as_matrix(p.U);
  CVecMap bias(p.b.data(), h4);
  saved->gates = X.topRows(L) * W.transpose();
  saved->gates.rowwise() += bias.transpose();
  saved->cells.resize(L, h1);
  saved->h_prev.resize(L, h1);
  saved->c_prev.resize(L, h1);

  Tensor out = Tensor::matrix(T, H);
  MatMap O = as_matrix(out.values(), T, H);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(h1);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(h1);
  Eigen::VectorXd z(h4);
  for (Eigen::Index k = 0; k < L; ++k) {
    Eigen::Index t = reverse ? L - 1 - k : k;
    saved->h_prev.row(t) = h.transpose();
    saved->c_prev.row(t) = c.transpose();
    z = saved->gates.row(t).transpose() + U * h;
    activate_gates(z, H);
    saved->gates.row(t) = z.transpose();
    c = z.segment(h1, h1).cwiseProduct(c) + z.head(h1).cwiseProduct(z.tail(h1));
    h = z.segment(2 * h1, h1).cwiseProduct(c.array().tanh().matrix());
    saved->cells.row(t) = c.transpose();
    O.row(t) = h.transpose();
  }

  return tape.record(std::move(out), [&p, x, saved, L, H, reverse](
                                         Tape& tp, std::span<const double> g) {
    const auto h1 = static_cast<Eigen::Index>(H);
    const std::size_t T = tp.value(x).rows();
    CMatMap G(g.data(), static_cast<Eigen::Index>(T), h1);
    RowMat dZ(L, 4 * h1);
    Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(h1);
    Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(h1);
    CMatMap U = as_matrix(p.U);
    for (Eigen::Index k = L; k-- > 0;) {
      Eigen::Index t = reverse ? L - 1 - k : k;
      auto gates = saved->gates.row(t);
      Eigen::VectorXd tc = saved->cells.row(t).array().tanh().transpose();
      Eigen::VectorXd dh = G.row(t).transpose() + dh_next;
      for (Eigen::Index j = 0; j < h1; ++j) {
        double i = gates[j], f = gates[h1 + j], o = gates[2 * h1 + j], gg = gates[3 * h1 + j];
        double dc = dc_next[j] + dh[j] * o * (1.0 - tc[j] * tc[j]);
        dZ(t, j) = dc * gg * i * (1.0 - i);
        dZ(t, h1 + j) = dc * saved->c_prev(t, j) * f * (1.0 - f);
        dZ(t, 2 * h1 + j) = dh[j] * tc[j] * o * (1.0 - o);
        dZ(t, 3 * h1 + j) = dc * i * (1.0 - gg * gg);
        dc_next[j] = dc * f;
      }
      dh_next = U.transpose() * dZ.row(t).transpose();
    }
    const Tensor& vx = tp.value(x);
    CMatMap X = as_matrix(vx);
    MatMap dW = as_matrix(p.W.grad(), 4 * H, p.input_dim);
    MatMap dU = as_matrix(p.U.grad(), 4 * H, H);
    VecMap db(p.b.grad().data(), 4 * h1);
    dW.noalias() += dZ.transpose() * X.topRows(L);
    dU.noalias() += dZ.transpose() * saved->h_prev;
    db += dZ.colwise().sum().transpose();
    if (tp.needs_grad(x)) {
      MatMap dX = as_matrix(tp.grad(x), T, p.input_dim);
      dX.topRows(L).noalias() += dZ * as_matrix(p.W);
    }
  });
}

Var bilstm_last(Tape& tape, Var states, std::size_t length) {
  const Tensor& s = tape.value(states);
  const std::size_t T = s.rows(), D = s.cols();
  if (s.rank() != 2 || D % 2 != 0 || length == 0 || length > T) {
    throw ConfigError(fmt::format("bilstm_last of {} at length {}",
                                  shape_string(s.shape()), length));
  }
  const std::size_t H = D / 2;
  std::vector<double> last(D);
  for (std::size_t k = 0; k < H; ++k) {
    last[k] = s.at(length - 1, k);
    last[H + k] = s.at(0, H + k);
  }
  return tape.record(Tensor::vector(std::move(last)),
                     [states, length, H](Tape& tp, std::span<const double> g) {
                       if (!tp.needs_grad(states)) return;
                       auto gs = tp.grad(states);
                       for (std::size_t k = 0; k < H; ++k) {
                         gs[(length - 1) * 2 * H + k] += g[k];
                         gs[H + k] += g[H + k];
                       }
                     },
                     tape.needs_grad(states));
}

BiLstmOutput bilstm_encode(Tape& tape, Var x, LstmCellParams& fwd, LstmCellParams& bwd,
                           std::size_t length) {
  if (length == 0) throw ConfigError("bilstm_encode of an empty sequence");
  if (fwd.hidden_size != bwd.hidden_size) {
    throw ConfigError("forward and backward hidden sizes differ");
  }
  Var f = lstm_sequence(tape, x, fwd, length, false);
  Var b = lstm_sequence(tape, x, bwd, length, true);
  Var states = hconcat(tape, f, b);
  return {states, bilstm_last(tape, states, length)};
}

AttentionParams::AttentionParams(std::size_t in, std::size_t attn)
    : input_dim(in),
      attn_dim(attn),
      Ws(Tensor::matrix(attn, in)),
      b(Tensor({attn})),
      v(Tensor({attn})) {
  if (in == 0 || attn == 0) throw ConfigError("attention dims must be at least 1");
}

void AttentionParams::initialize(Rng& rng, double scale) {
  uniform_fill(Ws, rng, scale);
  b.fill(0.0);
  uniform_fill(v, rng, scale);
}

namespace {

struct AttentionForward {
  RowMat u;                   // [L, A] tanh(Ws H[t] + b)
  std::vector<double> alpha;  // [T]
};

AttentionForward attention_forward(const Tensor& states, const AttentionParams& p,
                                   std::size_t length) {
  const std::size_t T = states.rows();
  if (states.rank() != 2 || states.cols() != p.input_dim) {
    throw ConfigError(fmt::format("attention over {} with input dim {}",
                                  shape_string(states.shape()), p.input_dim));
  }
  if (length == 0) throw ConfigError("attention with every position masked");
  if (length > T) throw ConfigError(fmt::format("attention length {} for {} rows", length, T));
  const auto L = static_cast<Eigen::Index>(length);
  const auto A = static_cast<Eigen::Index>(p.attn_dim);
  AttentionForward f;
  f.u = as_matrix(states).topRows(L) * as_matrix(p.Ws).transpose();
  f.u.rowwise() += CVecMap(p.b.data(), A).transpose();
  f.u = f.u.array().tanh().matrix();
  std::vector<double> e(T, -std::numeric_limits<double>::infinity());
  Eigen::VectorXd scores = f.u * CVecMap(p.v.data(), A);
  for (Eigen::Index t = 0; t < L; ++t) e[static_cast<std::size_t>(t)] = scores[t];
  f.alpha = masked_softmax(e, length);
  return f;
}

}  // namespace

std::vector<double> attention_weights(const Tensor& states, const AttentionParams& params,
                                      std::size_t length) {
  return attention_forward(states, params, length).alpha;
}

Var attention_pool(Tape& tape, Var states, AttentionParams& p, std::size_t length) {
  const Tensor& s = tape.value(states);
  auto fwd = std::make_shared<AttentionForward>(attention_forward(s, p, length));
  const std::size_t D = s.cols();
  std::vector<double> pooled(D, 0.0);
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t k = 0; k < D; ++k) pooled[k] += fwd->alpha[t] * s.at(t, k);
  }
  return tape.record(Tensor::vector(std::move(pooled)), [&p, states, fwd, length, D](
                                                            Tape& tp, std::span<const double> g) {
    const Tensor& s = tp.value(states);
    const auto L = static_cast<Eigen::Index>(length);
    const auto A = static_cast<Eigen::Index>(p.attn_dim);
    CMatMap S = CMatMap(s.data(), L, static_cast<Eigen::Index>(D));
    CVecMap go(g.data(), static_cast<Eigen::Index>(D));
    Eigen::VectorXd dalpha = S * go;
    double mean = 0.0;
    for (Eigen::Index t = 0; t < L; ++t) mean += fwd->alpha[static_cast<std::size_t>(t)] * dalpha[t];
    Eigen::VectorXd de(L);
    for (Eigen::Index t = 0; t < L; ++t) {
      de[t] = fwd->alpha[static_cast<std::size_t>(t)] * (dalpha[t] - mean);
    }
    CVecMap v(p.v.data(), A);
    VecMap dv(p.v.grad().data(), A);
    dv += fwd->u.transpose() * de;
    // d pre-activation = de_t * v * (1 - u^2)
    RowMat dpre = (de * v.transpose()).array() * (1.0 - fwd->u.array().square());
    MatMap dWs = as_matrix(p.Ws.grad(), p.attn_dim, D);
    VecMap db(p.b.grad().data(), A);
    dWs.noalias() += dpre.transpose() * S;
    db += dpre.colwise().sum().transpose();
    if (tp.needs_grad(states)) {
      MatMap dS = as_matrix(tp.grad(states), s.rows(), D);
      for (Eigen::Index t = 0; t < L; ++t) {
        dS.row(t) += fwd->alpha[static_cast<std::size_t>(t)] * go.transpose();
      }
      dS.topRows(L).noalias() += dpre * as_matrix(p.Ws);
    }
  });
}

}  // namespace corerev::tensornet
