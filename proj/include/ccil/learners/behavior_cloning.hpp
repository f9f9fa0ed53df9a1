#pragma once

#include <vector>

#include "ccil/common/rng.hpp"
#include "ccil/nn/matrix.hpp"
#include "ccil/nn/mlp.hpp"

namespace ccil::learners {

struct BcConfig {
  std::size_t epochs = 200;
  double learning_rate = 1e-3;
  std::size_t minibatch = 256;
  double train_fraction = 0.7;
  friend bool operator==(const BcConfig&, const BcConfig&) = default;
};

struct BcResult {
  nn::MlpNet policy;  // best validation checkpoint
  nn::MlpNet final_policy;
  double best_validation_nll = 0.0;
  double final_validation_nll = 0.0;
  std::size_t best_epoch = 0;
  std::vector<double> validation_curve;  // one entry per epoch
};

/// Mean negative log-likelihood of the pairs under the policy.
double negative_log_likelihood(const nn::MlpNet& policy, const nn::Matrix& states, const nn::Matrix& actions);

/// Maximum-likelihood fit of `policy` on a random 70% of the pairs with Adam;
/// returns the epoch with the lowest validation NLL. Throws ConfigError for
/// fewer than 10 pairs.
BcResult bc_train(nn::MlpNet policy, const nn::Matrix& states, const nn::Matrix& actions, const BcConfig& config,
                  Rng rng);

}  // namespace ccil::learners
