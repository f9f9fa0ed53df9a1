#include "ccil/learners/lagrangian.hpp"

#include <algorithm>
#include <cmath>

#include "ccil/common/errors.hpp"

namespace ccil::learners {

LagrangianState lambda_update(LagrangianState state, double j_k, double j_e) {
  if (!std::isfinite(j_k) || !std::isfinite(j_e)) throw NonFiniteError("lambda update needs finite costs");
  const double g = j_k - j_e;
  if (state.mode == LambdaMode::kPlain) {
    state.lambda = std::max(0.0, state.lambda + state.learning_rate * g);
  } else {
    state.lambda = std::max(0.0, nn::adam_step(state.lambda, g, state.adam, nn::Direction::kAscent));
  }
  return state;
}

CvagBranch cvag_branch(double j_k, double j_e) {
  return j_k <= j_e ? CvagBranch::kMaximizeReturn : CvagBranch::kMinimizeCost;
}

double outer_loss(std::span<const double> advantages, std::span<const double> costs, double lambda) {
  if (advantages.size() != costs.size() || advantages.empty()) throw ShapeError("outer loss needs matched samples");
  double s = 0.0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    const double e = advantages[i] - lambda * costs[i];
    s += e * e;
  }
  return s / static_cast<double>(costs.size());
}

double outer_gradient(std::span<const double> advantages, std::span<const double> costs, double lambda) {
  if (advantages.size() != costs.size() || advantages.empty()) throw ShapeError("outer loss needs matched samples");
  double s = 0.0;
  for (std::size_t i = 0; i < costs.size(); ++i) s += -2.0 * costs[i] * (advantages[i] - lambda * costs[i]);
  return s / static_cast<double>(costs.size());
}

double meta_step_unprojected(double lambda, std::span<const double> advantages, std::span<const double> costs,
                             double meta_lr) {
  return lambda - meta_lr * outer_gradient(advantages, costs, lambda);
}

double meta_step(double lambda, std::span<const double> advantages, std::span<const double> costs, double meta_lr) {
  return std::max(0.0, meta_step_unprojected(lambda, advantages, costs, meta_lr));
}

double lgail_cost_limit(std::span<const double> expert_episode_costs, double fraction) {
  if (expert_episode_costs.empty()) throw ConfigError("no expert episodes to derive a cost limit from");
  return fraction * *std::min_element(expert_episode_costs.begin(), expert_episode_costs.end());
}

}  // namespace ccil::learners
