#include "ccil/learners/behavior_cloning.hpp"

#include <algorithm>
#include <cmath>

#include "ccil/common/errors.hpp"
#include "ccil/learners/value_fit.hpp"
#include "ccil/nn/adam.hpp"
#include "ccil/nn/policy_head.hpp"

namespace ccil::learners {

double negative_log_likelihood(const nn::MlpNet& policy, const nn::Matrix& states, const nn::Matrix& actions) {
  if (states.rows() == 0) throw ShapeError("likelihood needs at least one pair");
  const auto lp = nn::log_prob(nn::evaluate_policy(policy, states), actions);
  double s = 0.0;
  for (double v : lp) s -= v;
  return s / static_cast<double>(lp.size());
}

BcResult bc_train(nn::MlpNet policy, const nn::Matrix& states, const nn::Matrix& actions, const BcConfig& config,
                  Rng rng) {
  const std::size_t n = states.rows();
  if (n < 10) throw ConfigError("behaviour cloning needs at least 10 state-action pairs");
  if (actions.rows() != n) throw ShapeError("state and action counts differ");
  if (config.epochs == 0 || config.minibatch == 0) throw ConfigError("epochs and minibatch must be positive");
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) throw ConfigError("train fraction must be in (0,1)");

  const auto perm = permutation(n, rng);
  const std::size_t n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(config.train_fraction * static_cast<double>(n))), 1, n - 1);
  std::vector<std::size_t> tr(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> va(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  const nn::Matrix xs = states.gather(tr), ys = actions.gather(tr);
  const nn::Matrix xv = states.gather(va), yv = actions.gather(va);

  nn::AdamState adam(policy.params().size(), config.learning_rate);
  BcResult res;
  res.policy = policy;
  res.best_validation_nll = negative_log_likelihood(policy, xv, yv);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = permutation(n_train, rng);
    for (std::size_t lo = 0; lo < n_train; lo += config.minibatch) {
      const std::size_t hi = std::min(n_train, lo + config.minibatch);
      std::span<const std::size_t> idx(order.data() + lo, hi - lo);
      const nn::Matrix x = xs.gather(idx), y = ys.gather(idx);
      const auto out = nn::evaluate_policy(policy, x);
      std::vector<double> w(idx.size(), 1.0 / static_cast<double>(idx.size()));
      const auto g = nn::log_prob_gradient(policy, out, y, w, 0.0);
      policy.set_params(nn::adam_step(policy.params(), g, adam, nn::Direction::kAscent));
    }
    const double v = negative_log_likelihood(policy, xv, yv);
    res.validation_curve.push_back(v);
    if (v < res.best_validation_nll) {
      res.best_validation_nll = v;
      res.best_epoch = epoch + 1;
      res.policy = policy;
    }
  }
  res.final_policy = policy;
  res.final_validation_nll = res.validation_curve.back();
  return res;
}

}  // namespace ccil::learners
