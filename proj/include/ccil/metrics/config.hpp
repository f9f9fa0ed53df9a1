#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccil/env/cmdp.hpp"
#include "ccil/env/grid_hazard.hpp"
#include "ccil/env/point_hazard.hpp"
#include "ccil/learners/behavior_cloning.hpp"
#include "ccil/learners/imitation_learner.hpp"
#include "ccil/oracle/expert.hpp"

namespace ccil::metrics {

/// Everything one `train` invocation needs.
struct RunConfig {
  learners::Algorithm algorithm = learners::Algorithm::kCcil;
  std::string env_name = "grid";
  std::uint64_t env_seed = 0;
  env::GridHazardSpec grid = env::default_grid_spec();
  env::PointHazardSpec point;
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir = "runs";
  std::size_t iterations = 500;
  bool early_stop = true;
  double stop_recovered_return = 95.0;
  std::size_t stop_patience = 20;
  std::size_t checkpoint_every = 50;
  double kappa = 1.2;
  std::size_t metric_window = 100;
  bool plots = false;
  learners::LearnerConfig learner;
  learners::BcConfig bc;
  std::string expert_path;
  /// Unset means the environment default (grid 2.0, point 10.0).
  std::optional<double> expert_budget;
  std::uint64_t expert_seed = 0;
  std::size_t expert_episodes = 10;
  oracle::SolverConfig solver;

  double budget() const;
  /// Master seed for one run: the run seed salted with env.seed.
  std::uint64_t master_seed(std::uint64_t seed) const;
  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parse `key = value` lines. `[section]` headers prefix the keys that follow
/// with `section.`; `#` starts a comment. Unknown keys are errors.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
/// Every key, one per line, in a fixed order; parse_config inverts it.
std::string serialize_config(const RunConfig& config);
/// Apply a single `key = value` override.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// "0..4" (inclusive range) or "0,3,7".
std::vector<std::uint64_t> parse_seeds(const std::string& s);

std::unique_ptr<env::Environment> make_environment(const RunConfig& config);

}  // namespace ccil::metrics
