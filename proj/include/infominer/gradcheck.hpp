// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "infominer/autodiff.hpp"

namespace infominer {

/// |a - g| / max(|a|, |g|), or |a - g| when both magnitudes are below 1e-8.
inline double gradient_error(double analytic, double numeric) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  const double diff = std::abs(analytic - numeric);
  return scale < 1e-8 ? diff : diff / scale;
}

struct ParamGradError {
  std::string name;
  double max_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckResult {
  double max_error = 0.0;
  std::vector<ParamGradError> per_param;
};

struct NamedTensor {
  std::string name;
  Tensor<double> tensor;
};

/// Compares reverse-mode gradients of `loss_fn` against central differences
/// (f(p + h) - f(p - h)) / 2h for every element of every parameter.
/// `loss_fn` must build its loss on the graph it is given and be a
/// deterministic function of the parameter values.
GradCheckResult finite_diff_check(
    const std::function<Tensor<double>(Graph<double>&)>& loss_fn,
    std::vector<NamedTensor> params, double h = 1e-5);

}  // namespace infominer
