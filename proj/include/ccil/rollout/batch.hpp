#pragma once

#include <cstdint>
#include <vector>

#include "ccil/env/cmdp.hpp"
#include "ccil/nn/matrix.hpp"
#include "ccil/nn/mlp.hpp"

namespace ccil::rollout {

/// One episode inside a batch: steps [start, start + length).
struct Episode {
  std::size_t start = 0;
  std::size_t length = 0;
  /// False when the batch edge cut the episode short.
  bool complete = false;
  double cost_sum = 0.0;
};

/// Per-episode summary of a batch. J_k and the return means average only
/// complete episodes.
struct BatchStats {
  std::size_t steps = 0;
  std::size_t episodes = 0;  // complete episodes
  double mean_cost = 0.0;    // J_k
  double total_cost = 0.0;   // over every step, complete or not
  double mean_true_return = 0.0;       // reporting only
  double mean_surrogate_return = 0.0;  // set by labelling
  std::size_t clipped_actions = 0;
};

/// K consecutive steps of one policy, split into episodes.
struct Batch {
  nn::Matrix observations;  // K x obs_dim
  nn::Matrix actions;       // K x stored action width
  std::vector<double> log_probs;
  std::vector<env::PrivilegedReward> true_rewards;
  std::vector<double> surrogate_rewards;  // empty until labelled
  std::vector<double> costs;
  std::vector<std::uint8_t> dones;
  std::vector<std::uint8_t> truncated;  // done at the horizon rather than at a terminal
  std::vector<Episode> episodes;
  /// Observation after the final step, used to bootstrap a cut episode.
  std::vector<double> final_observation;
  BatchStats stats;

  std::size_t size() const { return costs.size(); }
  bool terminal(std::size_t t) const { return dones[t] != 0 && truncated[t] == 0; }
  bool labelled() const { return surrogate_rewards.size() == costs.size() && !costs.empty(); }

  /// Steps of the selected episodes, in order, with episode records rebased.
  Batch select_episodes(const std::vector<std::size_t>& which) const;
  /// Throws ShapeError if the per-step series disagree in length.
  void validate() const;
};

/// Run `policy` for exactly `steps` environment steps. Each episode starts
/// from env.reset() with a seed drawn from the kEnv stream of `seed`;
/// actions are drawn from the kRollout stream.
Batch collect(const nn::MlpNet& policy, env::Environment& env, std::size_t steps, std::uint64_t seed);

/// Run until `episodes` episodes have finished; every episode is complete.
Batch collect_episodes(const nn::MlpNet& policy, env::Environment& env, std::size_t episodes, std::uint64_t seed);

/// Recompute the stats block from the per-step records.
BatchStats summarize(const Batch& batch);

/// Per-episode undiscounted true returns of the complete episodes.
std::vector<double> episode_true_returns(const Batch& batch);

}  // namespace ccil::rollout
