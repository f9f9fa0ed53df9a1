#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ccil/env/cmdp.hpp"
#include "ccil/gail/discriminator.hpp"
#include "ccil/learners/lagrangian.hpp"
#include "ccil/nn/adam.hpp"
#include "ccil/nn/matrix.hpp"
#include "ccil/nn/mlp.hpp"
#include "ccil/nn/serialize.hpp"
#include "ccil/rollout/batch.hpp"
#include "ccil/trpo/trust_region.hpp"

namespace ccil::learners {

enum class Algorithm { kCcil, kMalm, kCvag, kGail, kLgail, kBc };

const char* algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

/// Expert (state, action) pairs plus the per-episode anchors.
struct Demonstrations {
  nn::Matrix observations;
  nn::Matrix actions;
  std::vector<double> episode_costs;
  double mean_return = 0.0;  // R_E
  std::size_t terminal_episodes = 0;  // episodes that ended at a terminal, not the horizon

  double mean_cost() const;  // J_E
  std::size_t size() const { return observations.rows(); }
};

struct LearnerConfig {
  Algorithm algorithm = Algorithm::kCcil;
  std::vector<std::size_t> hidden{100, 100};
  std::size_t batch_size = 2000;
  std::size_t generator_steps = 3;
  std::size_t discriminator_steps = 1;
  double gamma = 0.995;
  double gae_lambda = 0.97;
  trpo::TrustRegionConfig trust_region;
  double policy_entropy = 0.0;
  double value_lr = 1e-3;
  std::size_t value_minibatch = 64;
  gail::DiscriminatorConfig discriminator;
  double lambda_init = 0.01;
  double lambda_lr = 0.05;
  LambdaMode lambda_mode = LambdaMode::kPlain;
  double meta_lr = 0.05;
  double meta_train_fraction = 0.7;
  double lgail_fraction = 0.9;
  /// Replaces d' for LGAIL when set.
  std::optional<double> cost_limit_override;
  /// Keep lambda at its initial value.
  bool freeze_lambda = false;
  /// Feed zeros instead of the environment cost to the learning updates.
  bool zero_cost_channel = false;

  void validate() const;
  friend bool operator==(const LearnerConfig&, const LearnerConfig&) = default;
};

/// One row of the run log.
struct IterationRecord {
  std::size_t iteration = 0;
  std::size_t steps = 0;  // cumulative environment steps
  std::size_t episodes = 0;
  double mean_true_return = 0.0;
  double mean_surrogate_return = 0.0;
  double mean_cost = 0.0;  // J_k
  double lambda = 0.0;
  double kl = 0.0;
  double cost_rate = 0.0;  // cumulative
  std::size_t accepted_steps = 0;
  std::string branch;  // CVAG branch, or the surrogate mode
  std::string warning;
};

/// Adversarial imitation learner with an optional cost constraint. The
/// algorithm enum selects how the surrogate and lambda are handled.
class ImitationLearner {
 public:
  ImitationLearner(LearnerConfig config, std::unique_ptr<env::Environment> env, Demonstrations expert,
                   std::uint64_t seed);

  /// Runs one outer iteration. On any error the learner is restored to its
  /// state at the start of the iteration and the error is rethrown.
  IterationRecord iterate();

  const LearnerConfig& config() const { return config_; }
  const nn::MlpNet& policy() const { return state_.policy; }
  const nn::MlpNet& reward_value() const { return state_.reward_value; }
  const nn::MlpNet& cost_value() const { return state_.cost_value; }
  const gail::Discriminator& discriminator() const { return state_.disc; }
  double lambda() const { return state_.lagrangian.lambda; }
  std::size_t iteration() const { return state_.iteration; }
  double expert_cost() const { return expert_cost_; }
  /// The cost the lambda update compares against (J_E, or d' for LGAIL).
  double cost_target() const { return cost_target_; }
  const Demonstrations& expert() const { return expert_; }

  nn::Checkpoint checkpoint() const;

 private:
  struct State {
    nn::MlpNet policy;
    nn::MlpNet reward_value;
    nn::MlpNet cost_value;
    nn::AdamState reward_adam;
    nn::AdamState cost_adam;
    gail::Discriminator disc;
    LagrangianState lagrangian;
    std::size_t iteration = 0;
    std::size_t total_steps = 0;
    double total_cost = 0.0;
  };

  IterationRecord step();
  void check_finite() const;
  nn::Matrix expert_minibatch(std::size_t n, Rng& rng) const;

  LearnerConfig config_;
  std::unique_ptr<env::Environment> env_;
  Demonstrations expert_;
  nn::Matrix expert_inputs_;
  Rng master_;
  double expert_cost_ = 0.0;
  double cost_target_ = 0.0;
  State state_;
};

}  // namespace ccil::learners
