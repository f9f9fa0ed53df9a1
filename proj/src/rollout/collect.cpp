#include <cmath>

#include "ccil/common/errors.hpp"
#include "ccil/nn/policy_head.hpp"
#include "ccil/rollout/batch.hpp"
#include "privileged.hpp"

namespace ccil::rollout {

namespace {

// Shared loop; stops at `max_steps` steps or `max_episodes` finished episodes.
Batch run(const nn::MlpNet& policy, env::Environment& env, std::size_t max_steps, std::size_t max_episodes,
          std::uint64_t seed) {
  const auto& spec = env.spec();
  if (policy.input_dim() != spec.observation_dim) throw ShapeError("policy input width differs from observation dim");
  Rng base(seed);
  Rng env_seeds = base.split(Stream::kEnv);
  Rng act_rng = base.split(Stream::kRollout);

  Batch b;
  b.observations = nn::Matrix(0, spec.observation_dim);
  b.actions = nn::Matrix(0, spec.action_space.stored_width());
  std::vector<double> obs = env.reset(env_seeds.next_u64());
  Episode ep;
  std::size_t finished = 0;
  while (b.size() < max_steps && finished < max_episodes) {
    nn::ActionSample a = sample_action(policy, obs, act_rng);
    env::StepOutcome out = env.step(a.action);
    b.observations.append_row(obs);
    b.actions.append_row(a.action);
    b.log_probs.push_back(a.log_prob);
    b.true_rewards.push_back(out.reward);
    b.costs.push_back(out.cost);
    b.dones.push_back(out.done ? 1 : 0);
    b.truncated.push_back(out.truncated ? 1 : 0);
    if (out.clipped) ++b.stats.clipped_actions;
    ++ep.length;
    ep.cost_sum += out.cost;
    if (out.done) {
      ep.complete = true;
      b.episodes.push_back(ep);
      ++finished;
      ep = Episode{};
      ep.start = b.size();
      obs = env.reset(env_seeds.next_u64());
    } else {
      obs = std::move(out.observation);
    }
  }
  if (ep.length > 0) b.episodes.push_back(ep);
  b.final_observation = obs;
  const std::size_t clipped = b.stats.clipped_actions;
  b.stats = summarize(b);
  b.stats.clipped_actions = clipped;
  return b;
}

}  // namespace

Batch collect(const nn::MlpNet& policy, env::Environment& env, std::size_t steps, std::uint64_t seed) {
  if (steps == 0) throw ConfigError("batch size must be at least 1");
  return run(policy, env, steps, static_cast<std::size_t>(-1), seed);
}

Batch collect_episodes(const nn::MlpNet& policy, env::Environment& env, std::size_t episodes, std::uint64_t seed) {
  if (episodes == 0) throw ConfigError("episode count must be at least 1");
  return run(policy, env, static_cast<std::size_t>(-1), episodes, seed);
}

BatchStats summarize(const Batch& batch) {
  const auto token = PrivilegedView::token();
  BatchStats s;
  s.steps = batch.size();
  for (double c : batch.costs) s.total_cost += c;
  double cost = 0.0, ret = 0.0, surr = 0.0;
  for (const Episode& ep : batch.episodes) {
    if (!ep.complete) continue;
    ++s.episodes;
    cost += ep.cost_sum;
    for (std::size_t t = ep.start; t < ep.start + ep.length; ++t) {
      ret += batch.true_rewards[t].read(token);
      if (batch.labelled()) surr += batch.surrogate_rewards[t];
    }
  }
  if (s.episodes > 0) {
    const double n = static_cast<double>(s.episodes);
    s.mean_cost = cost / n;
    s.mean_true_return = ret / n;
    s.mean_surrogate_return = surr / n;
  }
  return s;
}

std::vector<double> episode_true_returns(const Batch& batch) {
  const auto token = PrivilegedView::token();
  std::vector<double> out;
  for (const Episode& ep : batch.episodes) {
    if (!ep.complete) continue;
    double r = 0.0;
    for (std::size_t t = ep.start; t < ep.start + ep.length; ++t) r += batch.true_rewards[t].read(token);
    out.push_back(r);
  }
  return out;
}

Batch Batch::select_episodes(const std::vector<std::size_t>& which) const {
  std::vector<std::size_t> rows;
  Batch out;
  for (std::size_t k : which) {
    const Episode& ep = episodes.at(k);
    Episode e = ep;
    e.start = rows.size();
    out.episodes.push_back(e);
    for (std::size_t t = ep.start; t < ep.start + ep.length; ++t) rows.push_back(t);
  }
  out.observations = observations.gather(rows);
  out.actions = actions.gather(rows);
  for (std::size_t t : rows) {
    out.log_probs.push_back(log_probs[t]);
    out.true_rewards.push_back(true_rewards[t]);
    out.costs.push_back(costs[t]);
    out.dones.push_back(dones[t]);
    out.truncated.push_back(truncated[t]);
    if (labelled()) out.surrogate_rewards.push_back(surrogate_rewards[t]);
  }
  out.final_observation = final_observation;
  out.stats = summarize(out);
  return out;
}

void Batch::validate() const {
  const std::size_t k = costs.size();
  if (observations.rows() != k || actions.rows() != k || log_probs.size() != k || true_rewards.size() != k ||
      dones.size() != k || truncated.size() != k || (!surrogate_rewards.empty() && surrogate_rewards.size() != k)) {
    throw ShapeError("batch series have inconsistent lengths");
  }
  std::size_t covered = 0;
  for (const Episode& ep : episodes) {
    if (ep.start != covered) throw ShapeError("batch episodes are not contiguous");
    covered += ep.length;
  }
  if (covered != k) throw ShapeError("batch episodes do not cover every step");
  for (double lp : log_probs) {
    if (!std::isfinite(lp)) throw NonFiniteError("non-finite log-probability in batch");
  }
}

}  // namespace ccil::rollout
