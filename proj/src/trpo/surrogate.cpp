#include "ccil/trpo/surrogate.hpp"

#include <cmath>

#include "ccil/common/errors.hpp"

namespace ccil::trpo {

const char* mode_name(SurrogateMode m) {
  switch (m) {
    case SurrogateMode::kPenalized: return "penalized";
    case SurrogateMode::kRewardOnly: return "reward";
    case SurrogateMode::kCostMinimizing: return "cost";
  }
  return "?";
}

void SurrogateSpec::validate() const {
  if (mode == SurrogateMode::kPenalized && !(lambda >= 0.0)) throw ConfigError("penalized surrogate needs lambda >= 0");
  if (!(entropy_coef >= 0.0)) throw ConfigError("entropy coefficient must be nonnegative");
}

std::vector<double> combined_advantage(const PolicyBatch& batch, const SurrogateSpec& spec) {
  spec.validate();
  const std::size_t n = batch.size();
  std::vector<double> c(n);
  switch (spec.mode) {
    case SurrogateMode::kPenalized:
      if (batch.reward_advantages.size() != n || batch.cost_advantages.size() != n) {
        throw ShapeError("penalized surrogate needs both advantage channels");
      }
      for (std::size_t i = 0; i < n; ++i) c[i] = batch.reward_advantages[i] - spec.lambda * batch.cost_advantages[i];
      break;
    case SurrogateMode::kRewardOnly:
      if (batch.reward_advantages.size() != n) throw ShapeError("reward surrogate needs reward advantages");
      c = batch.reward_advantages;
      break;
    case SurrogateMode::kCostMinimizing:
      if (batch.cost_advantages.size() != n) throw ShapeError("cost surrogate needs cost advantages");
      for (std::size_t i = 0; i < n; ++i) c[i] = -batch.cost_advantages[i];
      break;
  }
  return c;
}

double surrogate_loss(const nn::PolicyOutput& current, std::span<const double> old_log_probs,
                      const PolicyBatch& batch, std::span<const double> combined, double entropy_coef) {
  const std::size_t n = batch.size();
  if (n == 0) throw ShapeError("surrogate needs a non-empty batch");
  if (old_log_probs.size() != n || combined.size() != n) throw ShapeError("surrogate inputs differ in length");
  const auto lp = nn::log_prob(current, batch.actions);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = lp[i] - old_log_probs[i];
    if (!(std::abs(gap) <= kMaxLogRatio)) throw NonFiniteError("importance ratio out of range");
    s += std::exp(gap) * combined[i];
  }
  s /= static_cast<double>(n);
  if (entropy_coef != 0.0) {
    double h = 0.0;
    for (double v : nn::entropy(current)) h += v;
    s += entropy_coef * h / static_cast<double>(n);
  }
  return s;
}

double surrogate_loss(const nn::MlpNet& policy_new, const nn::MlpNet& policy_old, const PolicyBatch& batch,
                      const SurrogateSpec& spec) {
  const auto old_out = nn::evaluate_policy(policy_old, batch.states);
  const auto old_lp = nn::log_prob(old_out, batch.actions);
  const auto c = combined_advantage(batch, spec);
  return surrogate_loss(nn::evaluate_policy(policy_new, batch.states), old_lp, batch, c, spec.entropy_coef);
}

nn::ParamVector surrogate_gradient(const nn::MlpNet& policy, const nn::PolicyOutput& out, const PolicyBatch& batch,
                                   std::span<const double> combined, double entropy_coef) {
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  std::vector<double> w(combined.begin(), combined.end());
  for (double& v : w) v *= inv_n;
  return nn::log_prob_gradient(policy, out, batch.actions, w, entropy_coef);
}

double mean_kl(const nn::PolicyOutput& current, const nn::PolicyOutput& old) {
  const auto kl = nn::kl_divergence(current, old);
  if (kl.empty()) return 0.0;
  double s = 0.0;
  for (double v : kl) s += v;
  return s / static_cast<double>(kl.size());
}

double mean_kl(const nn::MlpNet& policy_new, const nn::MlpNet& policy_old, const nn::Matrix& states) {
  return mean_kl(nn::evaluate_policy(policy_new, states), nn::evaluate_policy(policy_old, states));
}

}  // namespace ccil::trpo
