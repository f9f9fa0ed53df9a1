#include "ccil/rollout/gae.hpp"

#include <cmath>

#include "ccil/common/errors.hpp"

namespace ccil::rollout {

GaeResult gae(std::span<const double> x, std::span<const double> values, std::span<const std::uint8_t> dones,
              double gamma, double lambda, double bootstrap_value) {
  const std::size_t n = x.size();
  if (values.size() != n || dones.size() != n) throw ShapeError("gae series lengths differ");
  if (!(gamma >= 0.0 && gamma <= 1.0) || !(lambda >= 0.0 && lambda <= 1.0)) {
    throw ConfigError("gae requires gamma and lambda in [0,1]");
  }
  GaeResult r;
  r.advantages.assign(n, 0.0);
  r.returns.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double live = dones[i] ? 0.0 : 1.0;
    const double next_v = i + 1 < n ? values[i + 1] : bootstrap_value;
    const double delta = x[i] + gamma * next_v * live - values[i];
    running = delta + gamma * lambda * live * running;
    r.advantages[i] = running;
    r.returns[i] = running + values[i];
  }
  return r;
}

std::vector<double> whiten(std::span<const double> v) {
  if (v.empty()) return {};
  double mean = 0.0;
  for (double a : v) mean += a;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double a : v) var += (a - mean) * (a - mean);
  var /= static_cast<double>(v.size());
  const double inv = 1.0 / (std::sqrt(var) + 1e-8);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - mean) * inv;
  return out;
}

AdvantageBuffer AdvantageBuffer::select(std::span<const std::size_t> rows) const {
  AdvantageBuffer o;
  for (std::size_t t : rows) {
    o.reward_advantages.push_back(reward_advantages[t]);
    o.cost_advantages.push_back(cost_advantages[t]);
    o.reward_to_go.push_back(reward_to_go[t]);
    o.cost_to_go.push_back(cost_to_go[t]);
    o.reward_values.push_back(reward_values[t]);
    o.cost_values.push_back(cost_values[t]);
  }
  return o;
}

std::vector<double> predict_values(const nn::MlpNet& value_net, const nn::Matrix& observations) {
  nn::ForwardCache c = value_net.forward_batch(observations);
  std::vector<double> v(observations.rows());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = c.output()(i, 0);
  return v;
}

AdvantageBuffer compute_advantages(const Batch& batch, const nn::MlpNet& reward_value, const nn::MlpNet& cost_value,
                                   double gamma, double lambda) {
  if (!batch.labelled()) throw ConfigError("batch must carry surrogate rewards before computing advantages");
  AdvantageBuffer buf;
  buf.reward_values = predict_values(reward_value, batch.observations);
  buf.cost_values = predict_values(cost_value, batch.observations);
  const bool cut = !batch.dones.empty() && !batch.dones.back();
  const double boot_r = cut ? reward_value.forward(batch.final_observation)[0] : 0.0;
  const double boot_d = cut ? cost_value.forward(batch.final_observation)[0] : 0.0;
  GaeResult r = gae(batch.surrogate_rewards, buf.reward_values, batch.dones, gamma, lambda, boot_r);
  GaeResult d = gae(batch.costs, buf.cost_values, batch.dones, gamma, lambda, boot_d);
  buf.reward_advantages = whiten(r.advantages);
  buf.reward_to_go = std::move(r.returns);
  buf.cost_advantages = std::move(d.advantages);
  buf.cost_to_go = std::move(d.returns);
  return buf;
}

}  // namespace ccil::rollout
