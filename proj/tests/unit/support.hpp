#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "ccil/common/rng.hpp"
#include "ccil/env/cmdp.hpp"
#include "ccil/nn/param_vector.hpp"

namespace ccil::testing {

struct PrivilegedView {
  static env::RewardAccess token() { return {}; }
};

inline double read_reward(const env::PrivilegedReward& r) { return r.read(PrivilegedView::token()); }

/// Central differences of f over every parameter.
inline std::vector<double> numeric_gradient(const nn::ParamVector& p,
                                            const std::function<double(const nn::ParamVector&)>& f,
                                            double h = 1e-6) {
  std::vector<double> g(p.size());
  nn::ParamVector q = p;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double v = q[i];
    q[i] = v + h;
    const double up = f(q);
    q[i] = v - h;
    const double dn = f(q);
    q[i] = v;
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

/// ||a - b|| / max(||a||, ||b||, floor).
inline double relative_error(std::span<const double> a, std::span<const double> b, double floor = 1e-12) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

inline std::vector<double> random_vector(std::size_t n, Rng& rng, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

}  // namespace ccil::testing
