// SPDX-License-Identifier: Apache-2.0
#include "corerev/tensornet/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <fmt/core.h>

#include "corerev/error.hpp"

namespace corerev::tensornet {

std::vector<double> softmax(std::span<const double> logits) {
  return masked_softmax(logits, logits.size());
}

std::vector<double> masked_softmax(std::span<const double> logits, std::size_t length) {
  if (length == 0 || length > logits.size()) {
    throw ConfigError(fmt::format("softmax over {} of {} positions", length,
                                  logits.size()));
  }
  std::vector<double> out(logits.size(), 0.0);
  double mx = *std::max_element(logits.begin(), logits.begin() + static_cast<long>(length));
  double total = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    out[i] = std::exp(logits[i] - mx);
    total += out[i];
  }
  for (std::size_t i = 0; i < length; ++i) out[i] /= total;
  return out;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

Var embedding_lookup(Tape& tape, Tensor& table, std::span<const int> ids,
                     bool trainable, int frozen_row) {
  const std::size_t d = table.cols();
  Tensor out = Tensor::matrix(ids.size(), d);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] < 0 || static_cast<std::size_t>(ids[t]) >= table.rows()) {
      throw ConfigError(fmt::format("id {} outside table of {} rows", ids[t],
                                    table.rows()));
    }
    auto src = table.row(static_cast<std::size_t>(ids[t]));
    std::copy(src.begin(), src.end(), out.row(t).begin());
  }
  if (!trainable) return tape.constant(std::move(out));
  std::vector<int> kept(ids.begin(), ids.end());
  return tape.record(std::move(out), [&table, kept, d, frozen_row](
                                         Tape&, std::span<const double> g) {
    auto tg = table.grad();
    for (std::size_t t = 0; t < kept.size(); ++t) {
      if (kept[t] == frozen_row) continue;
      double* dst = tg.data() + static_cast<std::size_t>(kept[t]) * d;
      for (std::size_t k = 0; k < d; ++k) dst[k] += g[t * d + k];
    }
  });
}

Var one_hot(Tape& tape, std::span<const int> ids, std::size_t width) {
  Tensor out = Tensor::matrix(ids.size(), width);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] < 0 || static_cast<std::size_t>(ids[t]) >= width) {
      throw ConfigError(fmt::format("id {} outside one-hot width {}", ids[t], width));
    }
    out.at(t, static_cast<std::size_t>(ids[t])) = 1.0;
  }
  return tape.constant(std::move(out));
}

Var hconcat(Tape& tape, Var a, Var b) {
  const Tensor& va = tape.value(a);
  const Tensor& vb = tape.value(b);
  if (va.rank() != 2 || vb.rank() != 2 || va.rows() != vb.rows()) {
    throw ConfigError(fmt::format("hconcat of {} and {}", shape_string(va.shape()),
                                  shape_string(vb.shape())));
  }
  const std::size_t rows = va.rows(), ca = va.cols(), cb = vb.cols();
  Tensor out = Tensor::matrix(rows, ca + cb);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy(va.row(r).begin(), va.row(r).end(), out.row(r).begin());
    std::copy(vb.row(r).begin(), vb.row(r).end(), out.row(r).begin() + static_cast<long>(ca));
  }
  bool ng = tape.needs_grad(a) || tape.needs_grad(b);
  return tape.record(std::move(out), [a, b, rows, ca, cb](Tape& tp, std::span<const double> g) {
    if (tp.needs_grad(a)) {
      auto ga = tp.grad(a);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t k = 0; k < ca; ++k) ga[r * ca + k] += g[r * (ca + cb) + k];
    }
    if (tp.needs_grad(b)) {
      auto gb = tp.grad(b);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t k = 0; k < cb; ++k) gb[r * cb + k] += g[r * (ca + cb) + ca + k];
    }
  }, ng);
}

Var concat(Tape& tape, const std::vector<Var>& parts) {
  std::vector<double> data;
  std::vector<std::size_t> sizes;
  bool ng = false;
  for (Var p : parts) {
    auto vals = tape.value(p).values();
    data.insert(data.end(), vals.begin(), vals.end());
    sizes.push_back(vals.size());
    ng = ng || tape.needs_grad(p);
  }
  return tape.record(Tensor::vector(std::move(data)),
                     [parts, sizes](Tape& tp, std::span<const double> g) {
                       std::size_t off = 0;
                       for (std::size_t i = 0; i < parts.size(); ++i) {
                         if (tp.needs_grad(parts[i])) {
                           auto gp = tp.grad(parts[i]);
                           for (std::size_t k = 0; k < sizes[i]; ++k) gp[k] += g[off + k];
                         }
                         off += sizes[i];
                       }
                     },
                     ng);
}

Var mul(Tape& tape, Var a, Var b) {
  const Tensor& va = tape.value(a);
  const Tensor& vb = tape.value(b);
  if (va.size() != vb.size()) {
    throw ConfigError(fmt::format("mul of {} and {}", shape_string(va.shape()),
                                  shape_string(vb.shape())));
  }
  Tensor out(va.shape());
  for (std::size_t i = 0; i < va.size(); ++i) out[i] = va[i] * vb[i];
  bool ng = tape.needs_grad(a) || tape.needs_grad(b);
  return tape.record(std::move(out), [a, b](Tape& tp, std::span<const double> g) {
    const Tensor& xa = tp.value(a);
    const Tensor& xb = tp.value(b);
    if (tp.needs_grad(a)) {
      auto ga = tp.grad(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * xb[i];
    }
    if (tp.needs_grad(b)) {
      auto gb = tp.grad(b);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * xa[i];
    }
  }, ng);
}

Var dense_tanh(Tape& tape, Tensor& weight, Tensor& bias, Var x) {
  const Tensor& vx = tape.value(x);
  const std::size_t out_dim = weight.rows(), in_dim = weight.cols();
  if (weight.rank() != 2 || vx.size() != in_dim || bias.size() != out_dim) {
    throw ConfigError(fmt::format("dense of W {} b {} x {}", shape_string(weight.shape()),
                                  shape_string(bias.shape()), shape_string(vx.shape())));
  }
  Tensor out({out_dim});
  for (std::size_t r = 0; r < out_dim; ++r) {
    double acc = bias[r];
    auto w = weight.row(r);
    for (std::size_t k = 0; k < in_dim; ++k) acc += w[k] * vx[k];
    out[r] = std::tanh(acc);
  }
  auto y = std::make_shared<std::vector<double>>(out.values().begin(), out.values().end());
  return tape.record(std::move(out), [&weight, &bias, x, y, out_dim, in_dim](
                                         Tape& tp, std::span<const double> g) {
    const Tensor& xv = tp.value(x);
    auto gw = weight.grad();
    auto gb = bias.grad();
    std::vector<double> dpre(out_dim);
    for (std::size_t r = 0; r < out_dim; ++r) {
      dpre[r] = g[r] * (1.0 - (*y)[r] * (*y)[r]);
      gb[r] += dpre[r];
      double* row = gw.data() + r * in_dim;
      for (std::size_t k = 0; k < in_dim; ++k) row[k] += dpre[r] * xv[k];
    }
    if (tp.needs_grad(x)) {
      auto gx = tp.grad(x);
      for (std::size_t r = 0; r < out_dim; ++r) {
        auto w = weight.row(r);
        for (std::size_t k = 0; k < in_dim; ++k) gx[k] += w[k] * dpre[r];
      }
    }
  });
}

Var dropout(Tape& tape, Var x, double rate, Rng& rng, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError(fmt::format("dropout rate {} outside [0, 1)", rate));
  }
  if (!training || rate == 0.0) return x;
  const Tensor& vx = tape.value(x);
  const double keep = 1.0 - rate;
  auto mask = std::make_shared<std::vector<double>>(vx.size());
  Tensor out(vx.shape());
  for (std::size_t i = 0; i < vx.size(); ++i) {
    (*mask)[i] = uniform_unit(rng) < keep ? 1.0 / keep : 0.0;
    out[i] = vx[i] * (*mask)[i];
  }
  return tape.record(std::move(out), [x, mask](Tape& tp, std::span<const double> g) {
    if (!tp.needs_grad(x)) return;
    auto gx = tp.grad(x);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (*mask)[i];
  }, tape.needs_grad(x));
}

Var mse_loss(Tape& tape, Var pred, std::span<const double> label) {
  const Tensor& vp = tape.value(pred);
  if (vp.size() != label.size() || label.empty()) {
    throw ConfigError(fmt::format("mse of {} predictions and {} labels", vp.size(),
                                  label.size()));
  }
  const auto n = static_cast<double>(label.size());
  double total = 0.0;
  for (std::size_t i = 0; i < label.size(); ++i) {
    double d = label[i] - vp[i];
    total += d * d;
  }
  std::vector<double> labels(label.begin(), label.end());
  return tape.record(Tensor::vector({total / n}),
                     [pred, labels, n](Tape& tp, std::span<const double> g) {
                       if (!tp.needs_grad(pred)) return;
                       const Tensor& p = tp.value(pred);
                       auto gp = tp.grad(pred);
                       for (std::size_t i = 0; i < labels.size(); ++i) {
                         gp[i] += g[0] * 2.0 * (p[i] - labels[i]) / n;
                       }
                     },
                     tape.needs_grad(pred));
}

}  // namespace corerev::tensornet
