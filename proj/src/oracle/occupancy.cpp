#include "ccil/oracle/occupancy.hpp"

#include <cmath>

#include "ccil/common/errors.hpp"

namespace ccil::oracle {

namespace {

std::size_t sample(std::span<const double> probs, Rng& rng) {
  const double u = rng.uniform();
  double c = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    c += probs[i];
    if (u < c) return i;
  }
  // Rounding left a sliver above the cumulative sum; take the last nonzero entry.
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return i;
  }
  return probs.size() - 1;
}

void check_same_cells(const OccupancyMeasure& a, const OccupancyMeasure& b) {
  if (a.table.rows() != b.table.rows() || a.table.cols() != b.table.cols()) {
    throw ShapeError("occupancy measures cover different (s,a) sets");
  }
}

template <class PerStep>
std::vector<double> rollouts(const TabularMdp& mdp, const PolicyTable& pi, double gamma, std::size_t n, Rng& rng,
                             std::size_t width, PerStep&& on_step) {
  // Returns n x width per-rollout accumulators, flattened.
  std::vector<double> acc(n * width, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double* row = acc.data() + r * width;
    std::size_t s = sample(mdp.initial, rng);
    while (true) {
      const std::size_t a = sample(pi.row(s), rng);
      on_step(row, s, a);
      if (rng.uniform() >= gamma) break;
      s = sample({mdp.transition.data() + mdp.sa(s, a) * mdp.num_states, mdp.num_states}, rng);
    }
  }
  return acc;
}

MonteCarloEstimate summarize(const std::vector<double>& acc, std::size_t n, std::size_t width, std::size_t col) {
  double mean = 0.0;
  for (std::size_t r = 0; r < n; ++r) mean += acc[r * width + col];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double d = acc[r * width + col] - mean;
    var += d * d;
  }
  var /= static_cast<double>(n > 1 ? n - 1 : 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace

double OccupancyMeasure::total() const {
  double s = 0.0;
  for (double v : table.data()) s += v;
  return s;
}

double OccupancyMeasure::state_mass(std::size_t s) const {
  double m = 0.0;
  for (double v : table.row(s)) m += v;
  return m;
}

OccupancyMeasure exact_occupancy(const TabularMdp& mdp, const PolicyTable& pi, double gamma) {
  mdp.validate();
  validate_policy(mdp, pi);
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("occupancy needs gamma in [0,1)");
  const std::size_t S = mdp.num_states, A = mdp.num_actions;
  // A[s2][s] = delta - gamma * sum_a pi(a|s) P(s2|s,a)
  nn::Matrix m(S, S);
  for (std::size_t s = 0; s < S; ++s) m(s, s) = 1.0;
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      const double w = gamma * pi(s, a);
      if (w == 0.0) continue;
      for (std::size_t s2 = 0; s2 < S; ++s2) m(s2, s) -= w * mdp.p(s, a, s2);
    }
  }
  const std::vector<double> mu = lu_solve(std::move(m), mdp.initial);
  OccupancyMeasure rho{nn::Matrix(S, A), gamma};
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) rho.table(s, a) = pi(s, a) * mu[s];
  }
  return rho;
}

PolicyTable policy_from_occupancy(const OccupancyMeasure& rho, const TabularMdp* mdp) {
  const std::size_t S = rho.table.rows(), A = rho.table.cols();
  if (mdp && (mdp->num_states != S || mdp->num_actions != A)) throw ShapeError("occupancy does not match the MDP");
  PolicyTable pi(S, A);
  for (std::size_t s = 0; s < S; ++s) {
    for (double v : rho.table.row(s)) {
      if (!(v >= 0.0)) throw ConfigError("occupancy masses must be nonnegative");
    }
    const double m = rho.state_mass(s);
    if (m > 0.0) {
      for (std::size_t a = 0; a < A; ++a) pi(s, a) = rho.table(s, a) / m;
      continue;
    }
    if (mdp) {
      double inflow = mdp->initial[s];
      for (std::size_t s1 = 0; s1 < S; ++s1) {
        for (std::size_t a1 = 0; a1 < A; ++a1) inflow += rho.gamma * mdp->p(s1, a1, s) * rho.table(s1, a1);
      }
      if (inflow > 0.0) throw ConfigError("state " + std::to_string(s) + " has zero mass but positive inflow");
    }
    for (std::size_t a = 0; a < A; ++a) pi(s, a) = 1.0 / static_cast<double>(A);
  }
  return pi;
}

double flow_balance_residual(const TabularMdp& mdp, const OccupancyMeasure& rho) {
  const std::size_t S = mdp.num_states, A = mdp.num_actions;
  double worst = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    double rhs = mdp.initial[s];
    for (std::size_t s1 = 0; s1 < S; ++s1) {
      for (std::size_t a1 = 0; a1 < A; ++a1) rhs += rho.gamma * mdp.p(s1, a1, s) * rho.table(s1, a1);
    }
    worst = std::max(worst, std::abs(rho.state_mass(s) - rhs));
  }
  return worst;
}

double occupancy_entropy(const OccupancyMeasure& rho) {
  double h = 0.0;
  for (std::size_t s = 0; s < rho.table.rows(); ++s) {
    const double m = rho.state_mass(s);
    for (double v : rho.table.row(s)) {
      if (v > 0.0) h -= v * std::log(v / m);
    }
  }
  return h;
}

double expectation(const OccupancyMeasure& rho, std::span<const double> table) {
  if (table.size() != rho.table.data().size()) throw ShapeError("table does not match the occupancy cells");
  double s = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) s += rho.table.data()[i] * table[i];
  return (1.0 - rho.gamma) * s;
}

double saddle_objective(const OccupancyMeasure& rho_pi, const OccupancyMeasure& rho_e, const nn::Matrix& disc,
                        double lambda, std::span<const double> cost) {
  check_same_cells(rho_pi, rho_e);
  if (rho_pi.gamma != rho_e.gamma) throw ConfigError("occupancy measures use different discounts");
  const auto& dp = rho_pi.table.data();
  const auto& de = rho_e.table.data();
  const auto& dd = disc.data();
  if (dd.size() != dp.size()) throw ShapeError("discriminator table does not match the occupancy cells");
  double s = 0.0;
  for (std::size_t i = 0; i < dp.size(); ++i) {
    if (!(dd[i] > 0.0 && dd[i] < 1.0)) throw ConfigError("discriminator entries must lie in (0,1)");
    if (dp[i] > 0.0) s += dp[i] * std::log(dd[i]);
    if (de[i] > 0.0) s += de[i] * std::log(1.0 - dd[i]);
  }
  s *= (1.0 - rho_pi.gamma);
  return s + lambda * (expectation(rho_pi, cost) - expectation(rho_e, cost));
}

nn::Matrix optimal_discriminator(const OccupancyMeasure& rho_pi, const OccupancyMeasure& rho_e) {
  check_same_cells(rho_pi, rho_e);
  nn::Matrix d(rho_pi.table.rows(), rho_pi.table.cols());
  for (std::size_t i = 0; i < d.data().size(); ++i) {
    const double p = rho_pi.table.data()[i], e = rho_e.table.data()[i];
    d.data()[i] = p + e > 0.0 ? p / (p + e) : 0.5;
  }
  return d;
}

std::vector<MonteCarloEstimate> monte_carlo_occupancy(const TabularMdp& mdp, const PolicyTable& pi, double gamma,
                                                      std::size_t rollouts_n, Rng& rng) {
  mdp.validate();
  validate_policy(mdp, pi);
  if (rollouts_n < 2) throw ConfigError("Monte Carlo needs at least two rollouts");
  const std::size_t width = mdp.num_states * mdp.num_actions;
  const auto acc = rollouts(mdp, pi, gamma, rollouts_n, rng, width,
                            [&](double* row, std::size_t s, std::size_t a) { row[mdp.sa(s, a)] += 1.0; });
  std::vector<MonteCarloEstimate> out(width);
  for (std::size_t c = 0; c < width; ++c) out[c] = summarize(acc, rollouts_n, width, c);
  return out;
}

MonteCarloEstimate monte_carlo_causal_entropy(const TabularMdp& mdp, const PolicyTable& pi, double gamma,
                                              std::size_t rollouts_n, Rng& rng) {
  mdp.validate();
  validate_policy(mdp, pi);
  if (rollouts_n < 2) throw ConfigError("Monte Carlo needs at least two rollouts");
  const auto acc = rollouts(mdp, pi, gamma, rollouts_n, rng, 1,
                            [&](double* row, std::size_t s, std::size_t a) { row[0] -= std::log(pi(s, a)); });
  return summarize(acc, rollouts_n, 1, 0);
}

}  // namespace ccil::oracle
