#pragma once

#include <vector>

#include "ccil/common/rng.hpp"
#include "ccil/oracle/tabular.hpp"

namespace ccil::oracle {

/// Discounted state-action visitation mass rho(s, a); rows are states.
struct OccupancyMeasure {
  nn::Matrix table;
  double gamma = 0.0;

  double total() const;
  double state_mass(std::size_t s) const;
};

/// Solves (I - gamma P_pi^T) mu = p0 for the state visitation mu, then
/// rho(s, a) = pi(a|s) mu(s).
OccupancyMeasure exact_occupancy(const TabularMdp& mdp, const PolicyTable& pi, double gamma);

/// pi(a|s) = rho(s, a) / sum_a' rho(s, a'). States without mass get a uniform
/// row; when `mdp` is given, a massless state whose inflow
/// p0(s) + gamma sum P(s|s',a') rho(s',a') is positive is an error.
PolicyTable policy_from_occupancy(const OccupancyMeasure& rho, const TabularMdp* mdp = nullptr);

/// Largest absolute violation of the flow constraint
/// sum_a rho(s,a) = p0(s) + gamma sum_{s',a'} P(s|s',a') rho(s',a').
double flow_balance_residual(const TabularMdp& mdp, const OccupancyMeasure& rho);

/// -sum rho(s,a) log(rho(s,a) / sum_a' rho(s,a')), with 0 log 0 = 0.
double occupancy_entropy(const OccupancyMeasure& rho);

/// Occupancy-weighted mean of a per-(s,a) table, normalised by (1 - gamma).
double expectation(const OccupancyMeasure& rho, std::span<const double> table);

/// (1-gamma) [ sum rho_pi log D + sum rho_E log(1-D) + lambda (sum rho_pi d - sum rho_E d) ].
double saddle_objective(const OccupancyMeasure& rho_pi, const OccupancyMeasure& rho_e, const nn::Matrix& disc,
                        double lambda, std::span<const double> cost);

/// Per-cell maximiser of the D terms: rho_pi / (rho_pi + rho_E), 0.5 where both vanish.
nn::Matrix optimal_discriminator(const OccupancyMeasure& rho_pi, const OccupancyMeasure& rho_e);

/// Sample mean and standard error of a per-rollout statistic.
struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Rollouts with geometric termination (continue with probability gamma);
/// the visit count of each (s,a) is an unbiased estimate of rho(s,a).
std::vector<MonteCarloEstimate> monte_carlo_occupancy(const TabularMdp& mdp, const PolicyTable& pi, double gamma,
                                                      std::size_t rollouts, Rng& rng);

/// Same rollouts, accumulating -log pi(a_t|s_t): an estimate of the
/// visitation-weighted causal entropy.
MonteCarloEstimate monte_carlo_causal_entropy(const TabularMdp& mdp, const PolicyTable& pi, double gamma,
                                              std::size_t rollouts, Rng& rng);

}  // namespace ccil::oracle
