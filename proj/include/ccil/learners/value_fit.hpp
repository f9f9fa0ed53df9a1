#pragma once

#include <span>

#include "ccil/common/rng.hpp"
#include "ccil/nn/adam.hpp"
#include "ccil/nn/matrix.hpp"
#include "ccil/nn/mlp.hpp"

namespace ccil::learners {

/// Mean squared error of a scalar value net against targets.
double value_loss(const nn::MlpNet& net, const nn::Matrix& states, std::span<const double> targets);
nn::ParamVector value_loss_gradient(const nn::MlpNet& net, const nn::Matrix& states, std::span<const double> targets);

struct ValueFitReport {
  double reward_loss_before = 0.0;
  double cost_loss_before = 0.0;
  std::size_t minibatches = 0;
};

/// One Adam descent epoch for both value nets over shuffled minibatches. Both
/// nets see the same permutation, drawn from `shuffle`.
ValueFitReport fit_value_networks(const nn::Matrix& states, std::span<const double> reward_targets,
                                  std::span<const double> cost_targets, nn::MlpNet& reward_value,
                                  nn::MlpNet& cost_value, nn::AdamState& reward_adam, nn::AdamState& cost_adam,
                                  std::size_t minibatch, Rng& shuffle);

/// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> permutation(std::size_t n, Rng& rng);

}  // namespace ccil::learners
