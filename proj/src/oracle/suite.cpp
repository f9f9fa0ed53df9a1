#include "ccil/oracle/suite.hpp"

#include <cmath>
#include <ostream>

namespace ccil::oracle {

nn::Matrix numeric_discriminator(const OccupancyMeasure& rho_pi, const OccupancyMeasure& rho_e, double tol) {
  nn::Matrix d(rho_pi.table.rows(), rho_pi.table.cols());
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t i = 0; i < d.data().size(); ++i) {
    const double p = rho_pi.table.data()[i], e = rho_e.table.data()[i];
    auto f = [&](double x) { return p * std::log(x) + e * std::log(1.0 - x); };
    double a = 1e-15, b = 1.0 - 1e-15;
    double c = b - phi * (b - a), dd = a + phi * (b - a);
    double fc = f(c), fd = f(dd);
    while (b - a > tol) {
      if (fc > fd) {
        b = dd;
        dd = c;
        fd = fc;
        c = b - phi * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = dd;
        fc = fd;
        dd = a + phi * (b - a);
        fd = f(dd);
      }
    }
    d.data()[i] = 0.5 * (a + b);
  }
  return d;
}

bool SuiteReport::occupancy_ok() const {
  return checked > 0 && worst_mass_error <= 1e-8 && worst_flow_residual <= 1e-8 && worst_round_trip <= 1e-8 &&
         entropy_outside_3se == 0;
}

bool SuiteReport::saddle_ok() const { return checked > 0 && worst_saddle_gap <= 1e-6 && worst_lambda_collinearity <= 1e-12; }

SuiteReport run_oracle_suite(const SuiteConfig& cfg, std::ostream* log) {
  SuiteReport rep;
  Rng root(cfg.seed);
  for (std::size_t k = 0; k < cfg.mdps; ++k) {
    Rng rng = root.split(k);
    const std::size_t S = 1 + rng.below(cfg.max_states);
    const std::size_t A = 1 + rng.below(cfg.max_actions);
    const double gamma = cfg.gammas[k % cfg.gammas.size()];
    const TabularMdp mdp = random_mdp(S, A, rng);
    const PolicyTable pi = random_policy(S, A, rng);
    const PolicyTable pe = random_policy(S, A, rng);

    const OccupancyMeasure rho = exact_occupancy(mdp, pi, gamma);
    const double mass_err = std::abs(rho.total() - 1.0 / (1.0 - gamma));
    const double flow = flow_balance_residual(mdp, rho);
    const OccupancyMeasure back = exact_occupancy(mdp, policy_from_occupancy(rho, &mdp), gamma);
    double trip = 0.0;
    for (std::size_t i = 0; i < rho.table.data().size(); ++i) {
      const double ref = std::max(1.0, std::abs(rho.table.data()[i]));
      trip = std::max(trip, std::abs(back.table.data()[i] - rho.table.data()[i]) / ref);
    }

    Rng mc = rng.split(99);
    const MonteCarloEstimate h_mc = monte_carlo_causal_entropy(mdp, pi, gamma, cfg.entropy_rollouts, mc);
    const double h = occupancy_entropy(rho);
    const double z = h_mc.standard_error > 0.0 ? std::abs(h - h_mc.mean) / h_mc.standard_error
                                               : (std::abs(h - h_mc.mean) < 1e-12 ? 0.0 : INFINITY);

    // Saddle objective: closed-form D against numeric maximisation, and
    // linearity in lambda.
    const OccupancyMeasure rho_e = exact_occupancy(mdp, pe, gamma);
    const nn::Matrix d_star = optimal_discriminator(rho, rho_e);
    const nn::Matrix d_num = numeric_discriminator(rho, rho_e);
    const double at_star = saddle_objective(rho, rho_e, d_star, 0.0, mdp.cost);
    const double at_num = saddle_objective(rho, rho_e, d_num, 0.0, mdp.cost);
    const double gap = std::abs(at_star - at_num);
    const double l0 = saddle_objective(rho, rho_e, d_star, 0.0, mdp.cost);
    const double l1 = saddle_objective(rho, rho_e, d_star, 1.0, mdp.cost);
    const double l2 = saddle_objective(rho, rho_e, d_star, 2.0, mdp.cost);
    const double collinear = std::abs((l2 - l1) - (l1 - l0)) / std::max(1.0, std::abs(l0));

    ++rep.checked;
    rep.worst_mass_error = std::max(rep.worst_mass_error, mass_err);
    rep.worst_flow_residual = std::max(rep.worst_flow_residual, flow);
    rep.worst_round_trip = std::max(rep.worst_round_trip, trip);
    rep.worst_entropy_z = std::max(rep.worst_entropy_z, z);
    rep.worst_saddle_gap = std::max(rep.worst_saddle_gap, gap);
    rep.worst_lambda_collinearity = std::max(rep.worst_lambda_collinearity, collinear);
    if (z > 3.0) {
      ++rep.entropy_outside_3se;
      rep.failures.push_back("mdp " + std::to_string(k) + ": entropy off by " + std::to_string(z) + " standard errors");
    }
    if (log) {
      *log << "mdp " << k << " S=" << S << " A=" << A << " gamma=" << gamma << " mass_err=" << mass_err
           << " flow=" << flow << " round_trip=" << trip << " entropy=" << h << " mc=" << h_mc.mean << "±"
           << h_mc.standard_error << " saddle_gap=" << gap << "\n";
    }
  }
  return rep;
}

}  // namespace ccil::oracle
