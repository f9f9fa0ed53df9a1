#pragma once

#include <span>
#include <string>
#include <vector>

#include "ccil/learners/imitation_learner.hpp"

namespace ccil::metrics {

inline constexpr double kDefaultKappa = 1.2;

/// R/R_E - kappa * max(J/J_E - 1, 0). Throws ConfigError when R_E == 0 or J_E <= 0.
double penalized_return(double r, double r_e, double j, double j_e, double kappa = kDefaultKappa);
/// 100 R / R_E, or 0 when R < 0. Throws ConfigError when R_E == 0.
double recovered_return(double r, double r_e);
/// max(0, J - J_E).
double cost_violation(double j, double j_e);
/// Cumulative cost per environment step. Throws ConfigError for zero steps.
double cost_rate(double cumulative_cost, double cumulative_steps);

struct MetricRow {
  double r = 0.0;  // mean episode true return over the window
  double j = 0.0;  // mean episode cost over the window
  double r_e = 0.0;
  double j_e = 0.0;
  double r_pen = 0.0;  // NaN when J_E == 0
  double r_rec = 0.0;
  double cost_vio = 0.0;
  double cost_rate = 0.0;
  double kappa = kDefaultKappa;
  std::size_t window = 0;      // iterations actually averaged
  std::size_t iterations = 0;  // iterations in the run
  bool window_shrunk = false;
};

/// Averages the last `window` records (all of them when the run is shorter,
/// flagging window_shrunk) and applies the formulas.
MetricRow final_metrics(std::span<const learners::IterationRecord> records, double r_e, double j_e,
                        double kappa = kDefaultKappa, std::size_t window = 100);

/// Mean and sample standard deviation (n - 1 denominator; 0 for n < 2).
struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};
MeanStd mean_std(std::span<const double> v);

}  // namespace ccil::metrics
