#include "ccil/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccil/common/errors.hpp"

namespace ccil::metrics {

double penalized_return(double r, double r_e, double j, double j_e, double kappa) {
  if (r_e == 0.0) throw ConfigError("penalized return is undefined for an expert return of 0");
  if (!(j_e > 0.0)) throw ConfigError("penalized return is undefined for an expert cost of 0");
  return r / r_e - kappa * std::max(j / j_e - 1.0, 0.0);
}

double recovered_return(double r, double r_e) {
  if (r_e == 0.0) throw ConfigError("recovered return is undefined for an expert return of 0");
  if (r < 0.0) return 0.0;
  return r / r_e * 100.0;
}

double cost_violation(double j, double j_e) { return std::max(0.0, j - j_e); }

double cost_rate(double cumulative_cost, double cumulative_steps) {
  if (!(cumulative_steps > 0.0)) throw ConfigError("cost rate needs at least one step");
  return cumulative_cost / cumulative_steps;
}

MetricRow final_metrics(std::span<const learners::IterationRecord> records, double r_e, double j_e, double kappa,
                        std::size_t window) {
  if (records.empty()) throw ConfigError("no iterations to summarise");
  if (window == 0) throw ConfigError("metric window must be positive");
  MetricRow m;
  m.iterations = records.size();
  m.window = std::min(window, records.size());
  m.window_shrunk = m.window < window;
  for (std::size_t i = records.size() - m.window; i < records.size(); ++i) {
    m.r += records[i].mean_true_return;
    m.j += records[i].mean_cost;
  }
  m.r /= static_cast<double>(m.window);
  m.j /= static_cast<double>(m.window);
  m.r_e = r_e;
  m.j_e = j_e;
  m.kappa = kappa;
  m.r_pen = j_e > 0.0 ? penalized_return(m.r, r_e, m.j, j_e, kappa) : std::numeric_limits<double>::quiet_NaN();
  m.r_rec = recovered_return(m.r, r_e);
  m.cost_vio = cost_violation(m.j, j_e);
  m.cost_rate = records.back().cost_rate;
  return m;
}

MeanStd mean_std(std::span<const double> v) {
  MeanStd s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() < 2) return s;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return s;
}

}  // namespace ccil::metrics
