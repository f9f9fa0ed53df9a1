#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccil/oracle/occupancy.hpp"

namespace ccil::oracle {

/// Per-cell maximiser of rho_pi log D + rho_E log(1 - D) found by golden
/// section search; independent of the closed form.
nn::Matrix numeric_discriminator(const OccupancyMeasure& rho_pi, const OccupancyMeasure& rho_e, double tol = 1e-13);

struct SuiteConfig {
  std::size_t mdps = 50;
  std::size_t max_states = 10;
  std::size_t max_actions = 4;
  std::vector<double> gammas{0.5, 0.9, 0.99};
  std::size_t entropy_rollouts = 20000;
  std::uint64_t seed = 2024;
};

struct SuiteReport {
  std::size_t checked = 0;
  double worst_mass_error = 0.0;
  double worst_flow_residual = 0.0;
  double worst_round_trip = 0.0;
  double worst_entropy_z = 0.0;  // |exact - MC| / standard error
  std::size_t entropy_outside_3se = 0;
  double worst_saddle_gap = 0.0;       // closed-form vs numeric D
  double worst_lambda_collinearity = 0.0;
  std::vector<std::string> failures;

  bool occupancy_ok() const;
  bool saddle_ok() const;
};

/// Random tabular MDPs: occupancy invariants, policy round trip, occupancy
/// entropy against Monte-Carlo causal entropy, and the saddle-objective
/// structure. Writes one line per MDP to `log` when given.
SuiteReport run_oracle_suite(const SuiteConfig& config, std::ostream* log = nullptr);

}  // namespace ccil::oracle
