#include "ccil/nn/adam.hpp"

#include <cmath>

#include "ccil/common/errors.hpp"

namespace ccil::nn {

namespace {

void update(std::span<double> x, std::span<const double> g, AdamState& s, Direction dir) {
  for (double v : g) {
    if (!std::isfinite(v)) throw NonFiniteError("Adam received a non-finite gradient");
  }
  if (s.first_moment.size() != x.size() || s.second_moment.size() != x.size()) {
    throw ShapeError("Adam moments do not match the parameter length");
  }
  s.step_count += 1;
  const double t = static_cast<double>(s.step_count);
  const double c1 = 1.0 - std::pow(s.beta1, t);
  const double c2 = 1.0 - std::pow(s.beta2, t);
  const double sign = dir == Direction::kAscent ? 1.0 : -1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s.first_moment[i] = s.beta1 * s.first_moment[i] + (1.0 - s.beta1) * g[i];
    s.second_moment[i] = s.beta2 * s.second_moment[i] + (1.0 - s.beta2) * g[i] * g[i];
    const double mhat = s.first_moment[i] / c1;
    const double vhat = s.second_moment[i] / c2;
    x[i] += sign * s.learning_rate * mhat / (std::sqrt(vhat) + s.epsilon);
  }
}

}  // namespace

ParamVector adam_step(const ParamVector& params, const ParamVector& grad, AdamState& state, Direction dir) {
  params.require_same_shape(grad, "adam_step");
  ParamVector out = params;
  AdamState next = state;
  update(out.values(), grad.values(), next, dir);
  state = std::move(next);
  return out;
}

double adam_step(double value, double grad, AdamState& state, Direction dir) {
  AdamState next = state;
  update(std::span<double>(&value, 1), std::span<const double>(&grad, 1), next, dir);
  state = std::move(next);
  return value;
}

}  // namespace ccil::nn
