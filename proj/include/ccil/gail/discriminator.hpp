#pragma once

#include <span>
#include <vector>

#include "ccil/common/rng.hpp"
#include "ccil/env/cmdp.hpp"
#include "ccil/nn/adam.hpp"
#include "ccil/nn/matrix.hpp"
#include "ccil/nn/mlp.hpp"

namespace ccil::gail {

inline constexpr double kClampLow = 1e-6;
inline constexpr double kClampHigh = 1.0 - 1e-6;

struct DiscriminatorConfig {
  double learning_rate = 3e-4;
  double entropy_weight = 1e-3;
  /// Swap the roles: log D on expert pairs, log(1 - D) on learner pairs,
  /// surrogate reward -log(1 - D). Off by default.
  bool expert_positive = false;
  /// Append an absorbing-state flag column so terminal transitions can be
  /// scored (see absorbing_inputs).
  bool absorbing = true;
  friend bool operator==(const DiscriminatorConfig&, const DiscriminatorConfig&) = default;
};

/// Sigmoid classifier over concatenated (observation, encoded action).
/// Discrete actions are one-hot encoded.
class Discriminator {
 public:
  Discriminator() = default;
  Discriminator(std::size_t observation_dim, env::ActionSpace actions, std::vector<std::size_t> hidden, Rng& rng,
                DiscriminatorConfig config = {});

  std::size_t input_dim() const { return net_.input_dim(); }
  const env::ActionSpace& action_space() const { return actions_; }
  const DiscriminatorConfig& config() const { return config_; }

  nn::Matrix encode(const nn::Matrix& observations, const nn::Matrix& actions) const;
  /// `n` rows standing for the absorbing state after a terminal: zero
  /// observation and action, flag set. Requires config().absorbing.
  nn::Matrix absorbing_inputs(std::size_t n) const;

  /// Clamped D for each row of an encoded batch.
  std::vector<double> probabilities(const nn::Matrix& inputs) const;

  /// -log D (or -log(1 - D) under the swapped convention), one per row.
  std::vector<double> surrogate_rewards(const nn::Matrix& inputs) const;

  const nn::MlpNet& net() const { return net_; }
  nn::MlpNet& net() { return net_; }
  nn::AdamState& adam() { return adam_; }
  const nn::AdamState& adam() const { return adam_; }

 private:
  env::ActionSpace actions_;
  nn::MlpNet net_;
  nn::AdamState adam_;
  DiscriminatorConfig config_;
};

/// mean_learner log D + mean_expert log(1 - D) for given D values (roles
/// swapped under the expert-positive convention). Throws on empty batches.
double discriminator_loss(std::span<const double> d_learner, std::span<const double> d_expert,
                          bool expert_positive = false);
double discriminator_loss(const Discriminator& disc, const nn::Matrix& learner, const nn::Matrix& expert);

/// Loss plus entropy_weight * mean Bernoulli entropy of D over both batches;
/// the quantity the update ascends.
double discriminator_objective(const Discriminator& disc, const nn::Matrix& learner, const nn::Matrix& expert);
nn::ParamVector discriminator_gradient(const Discriminator& disc, const nn::Matrix& learner,
                                       const nn::Matrix& expert);

/// One Adam ascent step on the objective. Returns the objective before the step.
double discriminator_update(Discriminator& disc, const nn::Matrix& learner, const nn::Matrix& expert);

enum class EntropyEstimator { kAnalytic, kSampled };

struct EntropyEstimate {
  double value = 0.0;
  EntropyEstimator estimator = EntropyEstimator::kAnalytic;
};

/// Mean analytic entropy of the policy's action distribution over `states`.
EntropyEstimate causal_entropy(const nn::MlpNet& policy, const nn::Matrix& states);

}  // namespace ccil::gail
