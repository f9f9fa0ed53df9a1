#include "ccil/oracle/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccil/common/errors.hpp"

namespace ccil::oracle {

std::vector<double> lu_solve(nn::Matrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw ShapeError("lu_solve needs a square system");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    }
    if (!(std::abs(a(piv, k)) > 1e-300)) throw ConfigError("singular linear system");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

namespace {

void random_simplex(double* out, std::size_t n, Rng& rng) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = 0.05 + rng.uniform();
    s += out[i];
  }
  for (std::size_t i = 0; i < n; ++i) out[i] /= s;
}

}  // namespace

TabularMdp random_mdp(std::size_t states, std::size_t actions, Rng& rng) {
  if (states == 0 || actions == 0) throw ConfigError("random MDP needs states and actions");
  TabularMdp m;
  m.num_states = states;
  m.num_actions = actions;
  m.transition.resize(states * actions * states);
  m.initial.resize(states);
  m.cost.resize(states * actions);
  m.reward.resize(states * actions);
  for (std::size_t k = 0; k < states * actions; ++k) random_simplex(m.transition.data() + k * states, states, rng);
  random_simplex(m.initial.data(), states, rng);
  for (auto& c : m.cost) c = rng.uniform();
  for (auto& r : m.reward) r = rng.uniform();
  return m;
}

PolicyTable random_policy(std::size_t states, std::size_t actions, Rng& rng) {
  PolicyTable pi(states, actions);
  for (std::size_t s = 0; s < states; ++s) random_simplex(pi.row(s).data(), actions, rng);
  return pi;
}

void validate_policy(const TabularMdp& mdp, const PolicyTable& pi) {
  if (pi.rows() != mdp.num_states || pi.cols() != mdp.num_actions) throw ShapeError("policy table has the wrong shape");
  for (std::size_t s = 0; s < pi.rows(); ++s) {
    double t = 0.0;
    for (double p : pi.row(s)) {
      if (!(p >= 0.0)) throw ConfigError("policy probabilities must be nonnegative");
      t += p;
    }
    if (std::abs(t - 1.0) > 1e-9) throw ConfigError("policy row does not sum to 1");
  }
}

std::vector<double> value_iteration(const TabularMdp& mdp, double gamma, double penalty, std::size_t iterations,
                                    double tol) {
  mdp.validate();
  const std::size_t S = mdp.num_states, A = mdp.num_actions;
  std::vector<double> v(S, 0.0), next(S);
  for (std::size_t it = 0; it < iterations; ++it) {
    double delta = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < A; ++a) {
        double q = mdp.reward[mdp.sa(s, a)] - penalty * mdp.cost[mdp.sa(s, a)];
        for (std::size_t s2 = 0; s2 < S; ++s2) q += gamma * mdp.p(s, a, s2) * v[s2];
        best = std::max(best, q);
      }
      next[s] = best;
      delta = std::max(delta, std::abs(best - v[s]));
    }
    v.swap(next);
    if (delta < tol) break;
  }
  return v;
}

}  // namespace ccil::oracle
