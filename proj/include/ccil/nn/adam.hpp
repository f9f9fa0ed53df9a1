#pragma once

#include <cstdint>
#include <vector>

#include "ccil/nn/param_vector.hpp"

namespace ccil::nn {

enum class Direction { kAscent, kDescent };

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step_count = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamState() = default;
  AdamState(std::size_t n, double lr) : first_moment(n, 0.0), second_moment(n, 0.0), learning_rate(lr) {}
};

/// One bias-corrected Adam update. Throws NonFiniteError on NaN/Inf gradients
/// and ShapeError when lengths disagree; `state` is left untouched on error.
ParamVector adam_step(const ParamVector& params, const ParamVector& grad, AdamState& state, Direction dir);

/// Scalar variant used for the Adam-on-lambda mode.
double adam_step(double value, double grad, AdamState& state, Direction dir);

}  // namespace ccil::nn
