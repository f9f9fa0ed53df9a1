#include "ccil/learners/value_fit.hpp"

#include <algorithm>
#include <numeric>

#include "ccil/common/errors.hpp"

namespace ccil::learners {

double value_loss(const nn::MlpNet& net, const nn::Matrix& states, std::span<const double> targets) {
  if (states.rows() != targets.size() || targets.empty()) throw ShapeError("value loss needs one target per state");
  nn::ForwardCache c = net.forward_batch(states);
  double s = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double e = c.output()(i, 0) - targets[i];
    s += e * e;
  }
  return s / static_cast<double>(targets.size());
}

nn::ParamVector value_loss_gradient(const nn::MlpNet& net, const nn::Matrix& states,
                                    std::span<const double> targets) {
  if (states.rows() != targets.size() || targets.empty()) throw ShapeError("value loss needs one target per state");
  nn::ForwardCache c = net.forward_batch(states);
  nn::Matrix up(targets.size(), 1);
  const double k = 2.0 / static_cast<double>(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) up(i, 0) = k * (c.output()(i, 0) - targets[i]);
  return net.backward(c, up);
}

std::vector<std::size_t> permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

ValueFitReport fit_value_networks(const nn::Matrix& states, std::span<const double> reward_targets,
                                  std::span<const double> cost_targets, nn::MlpNet& reward_value,
                                  nn::MlpNet& cost_value, nn::AdamState& reward_adam, nn::AdamState& cost_adam,
                                  std::size_t minibatch, Rng& shuffle) {
  const std::size_t n = states.rows();
  if (reward_targets.size() != n || cost_targets.size() != n) throw ShapeError("value targets differ in length");
  if (minibatch == 0) throw ConfigError("value minibatch must be positive");
  ValueFitReport rep;
  if (n == 0) return rep;
  rep.reward_loss_before = value_loss(reward_value, states, reward_targets);
  rep.cost_loss_before = value_loss(cost_value, states, cost_targets);
  const auto perm = permutation(n, shuffle);
  for (std::size_t lo = 0; lo < n; lo += minibatch) {
    const std::size_t hi = std::min(n, lo + minibatch);
    std::span<const std::size_t> idx(perm.data() + lo, hi - lo);
    nn::Matrix x = states.gather(idx);
    std::vector<double> tr, td;
    for (std::size_t i : idx) {
      tr.push_back(reward_targets[i]);
      td.push_back(cost_targets[i]);
    }
    auto gr = value_loss_gradient(reward_value, x, tr);
    reward_value.set_params(nn::adam_step(reward_value.params(), gr, reward_adam, nn::Direction::kDescent));
    auto gd = value_loss_gradient(cost_value, x, td);
    cost_value.set_params(nn::adam_step(cost_value.params(), gd, cost_adam, nn::Direction::kDescent));
    ++rep.minibatches;
  }
  return rep;
}

}  // namespace ccil::learners
