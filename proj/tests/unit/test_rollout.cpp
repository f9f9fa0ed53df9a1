#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ccil/common/errors.hpp"
#include "ccil/env/grid_hazard.hpp"
#include "ccil/gail/discriminator.hpp"
#include "ccil/nn/policy_head.hpp"
#include "ccil/rollout/batch.hpp"
#include "ccil/rollout/gae.hpp"
#include "ccil/rollout/jsonl.hpp"
#include "ccil/rollout/label.hpp"
#include "support.hpp"

using namespace ccil;

namespace {

// Direct evaluation of sum_l (gamma lambda)^l delta_{t+l} inside t's episode.
std::vector<double> gae_direct(const std::vector<double>& x, const std::vector<double>& v,
                               const std::vector<std::uint8_t>& done, double g, double l, double boot) {
  const std::size_t n = x.size();
  std::vector<double> delta(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double next = done[k] ? 0.0 : (k + 1 < n ? v[k + 1] : boot);
    delta[k] = x[k] + g * next - v[k];
  }
  std::vector<double> a(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double w = 1.0;
    for (std::size_t k = t; k < n; ++k) {
      a[t] += w * delta[k];
      if (done[k]) break;
      w *= g * l;
    }
  }
  return a;
}

rollout::Batch hand_batch(const std::vector<double>& costs, const std::vector<std::uint8_t>& dones) {
  rollout::Batch b;
  b.observations = nn::Matrix(costs.size(), 1);
  b.actions = nn::Matrix(costs.size(), 1);
  b.costs = costs;
  b.dones = dones;
  b.truncated.assign(costs.size(), 0);
  b.log_probs.assign(costs.size(), 0.0);
  b.true_rewards.assign(costs.size(), env::PrivilegedReward(1.0));
  rollout::Episode ep;
  for (std::size_t t = 0; t < costs.size(); ++t) {
    ++ep.length;
    ep.cost_sum += costs[t];
    if (dones[t]) {
      ep.complete = true;
      b.episodes.push_back(ep);
      ep = rollout::Episode{};
      ep.start = t + 1;
    }
  }
  if (ep.length > 0) b.episodes.push_back(ep);
  b.stats = rollout::summarize(b);
  return b;
}

}  // namespace

TEST_CASE("gae hand examples") {
  auto r = rollout::gae(std::vector<double>{1, 0, 1}, std::vector<double>{0, 0, 0}, std::vector<std::uint8_t>{0, 0, 1},
                        1.0, 1.0);
  CHECK(r.advantages == std::vector<double>{2, 1, 1});
  CHECK(r.returns == std::vector<double>{2, 1, 1});

  auto s = rollout::gae(std::vector<double>{1, 1, 1}, std::vector<double>{1, 1, 1}, std::vector<std::uint8_t>{0, 0, 1},
                        0.5, 0.0);
  CHECK(s.advantages == std::vector<double>{0.5, 0.5, 0.0});
}

TEST_CASE("gae equals the direct sum on random series") {
  Rng rng(20);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(50);
    std::vector<double> x(n), v(n);
    std::vector<std::uint8_t> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.normal();
      v[i] = rng.normal();
      d[i] = rng.uniform() < 0.1;
    }
    const double g = rng.uniform(0.8, 1.0), l = rng.uniform(0.0, 1.0), boot = rng.normal();
    auto r = rollout::gae(x, v, d, g, l, boot);
    auto want = gae_direct(x, v, d, g, l, boot);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(r.advantages[i] - want[i]) <= 1e-10);
      CHECK(r.returns[i] == r.advantages[i] + v[i]);
    }
  }
}

TEST_CASE("gae rejects mismatched lengths") {
  CHECK_THROWS_AS(rollout::gae(std::vector<double>{1, 2}, std::vector<double>{1}, std::vector<std::uint8_t>{0, 0}, 0.9,
                               0.9),
                  ShapeError);
}

TEST_CASE("whitening gives zero mean and unit population variance") {
  Rng rng(21);
  auto v = testing::random_vector(200, rng, 3.0);
  for (double& x : v) x += 5.0;
  auto w = rollout::whiten(v);
  double m = 0.0, s = 0.0;
  for (double x : w) m += x;
  m /= 200.0;
  for (double x : w) s += (x - m) * (x - m);
  CHECK(std::abs(m) < 1e-12);
  CHECK(s / 200.0 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("batch statistics average complete episodes only") {
  auto b = hand_batch({1, 0, 0, 0, 1, 1}, {0, 0, 1, 0, 0, 1});
  CHECK(b.stats.episodes == 2);
  CHECK(b.stats.mean_cost == 1.5);
  CHECK(b.stats.mean_true_return == 3.0);

  auto cut = hand_batch({1, 0, 0, 1, 1}, {0, 0, 1, 0, 0});
  CHECK(cut.stats.episodes == 1);
  CHECK(cut.stats.mean_cost == 1.0);
  CHECK(cut.stats.total_cost == 3.0);
  CHECK(cut.terminal(2));
  CHECK_FALSE(cut.terminal(4));
}

TEST_CASE("collect produces exactly K steps and replays under a fixed seed") {
  Rng rng(22);
  env::GridHazardEnv e(env::default_grid_spec());
  nn::MlpNet policy(25, {8}, 4, nn::Head::kCategoricalPolicy, rng);
  auto a = rollout::collect(policy, e, 137, 99);
  auto b = rollout::collect(policy, e, 137, 99);
  a.validate();
  CHECK(a.size() == 137);
  CHECK(a.observations == b.observations);
  CHECK(a.actions == b.actions);
  CHECK(a.log_probs == b.log_probs);
  CHECK(a.costs == b.costs);
  auto c = rollout::collect(policy, e, 137, 100);
  CHECK_FALSE(c.actions == a.actions);

  // Stored log-probabilities match a fresh evaluation.
  auto lp = nn::log_prob(nn::evaluate_policy(policy, a.observations), a.actions);
  for (std::size_t t = 0; t < a.size(); ++t) CHECK(lp[t] == doctest::Approx(a.log_probs[t]).epsilon(1e-12));

  auto eps = rollout::collect_episodes(policy, e, 3, 5);
  CHECK(eps.stats.episodes == 3);
  for (const auto& ep : eps.episodes) CHECK(ep.complete);
}

TEST_CASE("a one-action policy logs identical log-probabilities") {
  Rng rng(23);
  env::GridHazardEnv e(env::default_grid_spec());
  nn::MlpNet policy(25, {4}, 4, nn::Head::kCategoricalPolicy, rng);
  nn::ParamVector p = policy.params().zeros_like();
  p.block(p.find_block("fc1.bias"))[0] = 50.0;
  policy.set_params(p);
  auto b = rollout::collect(policy, e, 5, 1);
  CHECK(b.size() == 5);
  for (double lp : b.log_probs) CHECK(lp == b.log_probs[0]);
}

TEST_CASE("labelling fills surrogate rewards and compute_advantages needs them") {
  Rng rng(24);
  env::GridHazardEnv e(env::default_grid_spec());
  nn::MlpNet policy(25, {8}, 4, nn::Head::kCategoricalPolicy, rng);
  gail::Discriminator disc(25, e.spec().action_space, {8}, rng);
  nn::MlpNet vr(25, {8}, 1, nn::Head::kScalarValue, rng), vd(25, {8}, 1, nn::Head::kScalarValue, rng);
  auto b = rollout::collect(policy, e, 120, 3);
  CHECK_THROWS_AS(rollout::compute_advantages(b, vr, vd, 0.99, 0.97), ConfigError);
  rollout::label_surrogate_reward(b, disc);
  REQUIRE(b.labelled());
  for (double r : b.surrogate_rewards) CHECK(r > 0.0);
  auto adv = rollout::compute_advantages(b, vr, vd, 0.99, 0.97);
  CHECK(adv.reward_advantages.size() == 120);

  // Independent recomputation of both channels.
  auto v_r = rollout::predict_values(vr, b.observations);
  auto v_d = rollout::predict_values(vd, b.observations);
  const bool cut = !b.dones.back();
  const double boot_r = cut ? vr.forward(b.final_observation)[0] : 0.0;
  const double boot_d = cut ? vd.forward(b.final_observation)[0] : 0.0;
  auto raw_r = gae_direct(b.surrogate_rewards, v_r, b.dones, 0.99, 0.97, boot_r);
  auto raw_d = gae_direct(b.costs, v_d, b.dones, 0.99, 0.97, boot_d);
  auto white = rollout::whiten(raw_r);
  for (std::size_t t = 0; t < 120; ++t) {
    CHECK(std::abs(adv.cost_advantages[t] - raw_d[t]) < 1e-10);
    CHECK(std::abs(adv.reward_advantages[t] - white[t]) < 1e-9);
    CHECK(std::abs(adv.reward_to_go[t] - (raw_r[t] + v_r[t])) < 1e-10);
  }
}

TEST_CASE("jsonl rows carry every per-step field") {
  Rng rng(25);
  env::GridHazardEnv e(env::default_grid_spec());
  nn::MlpNet policy(25, {8}, 4, nn::Head::kCategoricalPolicy, rng);
  auto b = rollout::collect(policy, e, 4, 3);
  std::stringstream ss;
  rollout::write_jsonl(ss, b);
  std::string line;
  int n = 0;
  while (std::getline(ss, line)) {
    auto j = nlohmann::json::parse(line);
    for (const char* k : {"t", "obs", "act", "logp", "r_true", "r_surr", "cost", "done", "truncated"}) {
      CHECK(j.contains(k));
    }
    CHECK(j["r_surr"].is_null());
    CHECK(j["obs"].size() == 25);
    ++n;
  }
  CHECK(n == 4);
}
