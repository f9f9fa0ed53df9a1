#pragma once

#include <vector>

#include "ccil/common/rng.hpp"
#include "ccil/env/tabular.hpp"
#include "ccil/nn/matrix.hpp"

namespace ccil::oracle {

using env::TabularMdp;

/// Policy table: rows are states, columns actions, rows sum to 1.
using PolicyTable = nn::Matrix;

/// Dense LU solve with partial pivoting. Throws ConfigError when singular.
std::vector<double> lu_solve(nn::Matrix a, std::vector<double> b);

/// Random MDP with strictly positive transition rows, a random initial
/// distribution and uniform [0,1) rewards and costs.
TabularMdp random_mdp(std::size_t states, std::size_t actions, Rng& rng);

/// Random strictly positive row-stochastic policy.
PolicyTable random_policy(std::size_t states, std::size_t actions, Rng& rng);

/// Throws ConfigError unless `pi` is row-stochastic with the MDP's shape.
void validate_policy(const TabularMdp& mdp, const PolicyTable& pi);

/// Action-value iteration for the discounted return of
/// reward - penalty * cost; returns the greedy state values.
std::vector<double> value_iteration(const TabularMdp& mdp, double gamma, double penalty = 0.0,
                                    std::size_t iterations = 10000, double tol = 1e-12);

}  // namespace ccil::oracle
