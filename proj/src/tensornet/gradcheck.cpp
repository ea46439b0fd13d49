// SPDX-License-Identifier: Apache-2.0
#include "corerev/tensornet/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace corerev::tensornet {

namespace {

double evaluate(const std::function<Var(Tape&)>& loss) {
  Tape tape;
  return tape.scalar(loss(tape));
}

}  // namespace

GradcheckResult gradcheck(const std::function<Var(Tape&)>& loss,
                          const std::vector<NamedTensor>& tensors, double eps,
                          std::size_t max_entries, double floor) {
  for (const auto& nt : tensors) nt.tensor->zero_grad();
  {
    Tape tape;
    Var root = loss(tape);
    tape.backward(root);
  }
  GradcheckResult result;
  for (const auto& nt : tensors) {
    Tensor& t = *nt.tensor;
    std::vector<double> analytic(t.grad().begin(), t.grad().end());
    std::size_t n = t.size();
    std::size_t count = max_entries == 0 ? n : std::min(n, max_entries);
    for (std::size_t j = 0; j < count; ++j) {
      std::size_t idx = count == n ? j : j * n / count;
      double saved = t[idx];
      t[idx] = saved + eps;
      double up = evaluate(loss);
      t[idx] = saved - eps;
      double down = evaluate(loss);
      t[idx] = saved;
      double numeric = (up - down) / (2.0 * eps);
      double a = analytic[idx];
      double rel = std::abs(a - numeric) /
                   std::max({std::abs(a), std::abs(numeric), floor});
      ++result.checked;
      if (result.worst.empty() || rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst = fmt::format("{}[{}]", nt.name, idx);
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  for (const auto& nt : tensors) nt.tensor->zero_grad();
  return result;
}

}  // namespace corerev::tensornet
