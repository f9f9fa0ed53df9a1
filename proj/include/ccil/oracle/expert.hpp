#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccil/env/cmdp.hpp"
#include "ccil/learners/imitation_learner.hpp"
#include "ccil/rollout/batch.hpp"

namespace ccil::oracle {

struct SolverConfig {
  std::vector<std::size_t> hidden{64, 64};
  std::size_t batch_size = 2000;
  std::size_t max_iterations = 400;
  std::size_t min_iterations = 30;
  /// The solver's own discount; shorter horizons make the goal-seeking
  /// preference sharper than the learners' 0.995.
  double gamma = 0.95;
  double gae_lambda = 0.97;
  double max_kl = 0.02;
  double value_lr = 1e-3;
  std::size_t value_minibatch = 64;
  double lambda_init = 0.0;
  double lambda_lr = 0.05;
  /// Episodes in the rolling window used for the feasibility check.
  std::size_t window_episodes = 100;
  /// Reward plateau: rolling-window mean moved by at most this much
  /// between consecutive windows.
  double plateau_tolerance = 0.02;
  std::size_t dataset_episodes = 10;
  std::size_t max_resamples = 200;

  std::string describe() const;
  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

/// Feasibility threshold for a budget d0: max(1.05 d0, 0.05).
double feasibility_threshold(double budget);

struct DatasetSummary {
  std::size_t episodes = 0;
  double reward_mean = 0.0;
  double reward_std = 0.0;
  double cost_mean = 0.0;
  double cost_std = 0.0;
};

struct ExpertDataset {
  rollout::Batch steps;  // complete episodes only
  std::string env_description;
  std::uint64_t spec_hash = 0;
  double gamma = 0.995;
  double budget = 0.0;
  std::uint64_t seed = 0;
  std::string solver_description;
  DatasetSummary summary;

  std::vector<double> episode_costs() const;
  std::vector<double> episode_returns() const;
  /// Recompute the summary from the raw steps.
  DatasetSummary recompute_summary() const;
  learners::Demonstrations demonstrations() const;
};

struct ForgeProgress {
  std::size_t iteration = 0;
  double window_reward = 0.0;
  double window_cost = 0.0;
  double lambda = 0.0;
};

/// Lagrangian TRPO on the true reward with constraint J <= budget. Throws
/// Error with the best window seen when feasibility is not reached.
ExpertDataset train_expert(const env::Environment& env, double budget, const SolverConfig& config,
                           std::uint64_t seed, const std::function<void(const ForgeProgress&)>& progress = {});

/// Header line (JSON) followed by one JSON object per step.
void write_dataset(std::ostream& os, const ExpertDataset& ds);
void save_dataset(const std::filesystem::path& path, const ExpertDataset& ds);
/// Throws FormatError on malformed input or when the stored summary does not
/// match the steps.
ExpertDataset read_dataset(std::istream& is);
ExpertDataset load_dataset(const std::filesystem::path& path);

/// fnv1a64 of the file bytes, as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);
std::string hex64(std::uint64_t v);

/// Table block: environment, dataset size, reward mean ± std, cost mean ± std.
std::string summary_block(const std::string& env_name, const ExpertDataset& ds);

}  // namespace ccil::oracle
