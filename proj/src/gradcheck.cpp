// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#include "infominer/gradcheck.hpp"

namespace infominer {

GradCheckResult finite_diff_check(
    const std::function<Tensor<double>(Graph<double>&)>& loss_fn,
    std::vector<NamedTensor> params, double h) {
  for (auto& p : params) {
    p.tensor.set_requires_grad(true);
    p.tensor.zero_grad();
  }
  {
    Graph<double> graph;
    graph.backward(loss_fn(graph));
  }

  auto evaluate = [&] {
    auto graph = Graph<double>::no_grad();
    return loss_fn(graph).item();
  };

  GradCheckResult result;
  for (auto& p : params) {
    ParamGradError err;
    err.name = p.name;
    const auto analytic = p.tensor.grad();
    for (std::size_t i = 0; i < p.tensor.size(); ++i) {
      const double saved = p.tensor[i];
      p.tensor[i] = saved + h;
      const double up = evaluate();
      p.tensor[i] = saved - h;
      const double down = evaluate();
      p.tensor[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double e = gradient_error(analytic[i], numeric);
      if (e > err.max_error || i == 0) {
        err.max_error = e;
        err.worst_index = i;
        err.analytic = analytic[i];
        err.numeric = numeric;
      }
    }
    result.max_error = std::max(result.max_error, err.max_error);
    result.per_param.push_back(std::move(err));
  }
  return result;
}

}  // namespace infominer
