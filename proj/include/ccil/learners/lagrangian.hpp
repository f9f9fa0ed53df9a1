#pragma once

#include <span>

#include "ccil/nn/adam.hpp"

namespace ccil::learners {

enum class LambdaMode { kPlain, kAdam };

struct LagrangianState {
  double lambda = 0.01;
  double learning_rate = 0.05;
  LambdaMode mode = LambdaMode::kPlain;
  nn::AdamState adam{1, 0.05};

  LagrangianState() = default;
  LagrangianState(double initial, double lr, LambdaMode m = LambdaMode::kPlain)
      : lambda(initial), learning_rate(lr), mode(m), adam(1, lr) {}
};

/// lambda <- max(0, lambda + lr * (J_k - J_E)), or an Adam ascent step on the
/// same gradient followed by the projection.
LagrangianState lambda_update(LagrangianState state, double j_k, double j_e);

/// Which CVAG update an iteration performs.
enum class CvagBranch { kMaximizeReturn, kMinimizeCost };
CvagBranch cvag_branch(double j_k, double j_e);

/// Validation loss mean_t (A_t - lambda d_t)^2 and its lambda-derivative.
double outer_loss(std::span<const double> advantages, std::span<const double> costs, double lambda);
double outer_gradient(std::span<const double> advantages, std::span<const double> costs, double lambda);

/// lambda - meta_lr * outer_gradient, without projection.
double meta_step_unprojected(double lambda, std::span<const double> advantages, std::span<const double> costs,
                             double meta_lr);
/// Projected meta step.
double meta_step(double lambda, std::span<const double> advantages, std::span<const double> costs, double meta_lr);

/// d' = fraction * min expert episode cost.
double lgail_cost_limit(std::span<const double> expert_episode_costs, double fraction = 0.9);

}  // namespace ccil::learners
