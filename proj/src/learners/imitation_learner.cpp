#include "ccil/learners/imitation_learner.hpp"

#include <cmath>
#include <numeric>

#include "ccil/common/errors.hpp"
#include "ccil/learners/value_fit.hpp"
#include "ccil/rollout/gae.hpp"
#include "ccil/rollout/label.hpp"

namespace ccil::learners {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kCcil: return "ccil";
    case Algorithm::kMalm: return "malm";
    case Algorithm::kCvag: return "cvag";
    case Algorithm::kGail: return "gail";
    case Algorithm::kLgail: return "lgail";
    case Algorithm::kBc: return "bc";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& s) {
  for (Algorithm a : {Algorithm::kCcil, Algorithm::kMalm, Algorithm::kCvag, Algorithm::kGail, Algorithm::kLgail,
                      Algorithm::kBc}) {
    if (s == algorithm_name(a)) return a;
  }
  throw ConfigError("unknown algorithm '" + s + "' (expected ccil, malm, cvag, gail, lgail or bc)");
}

double Demonstrations::mean_cost() const {
  if (episode_costs.empty()) throw ConfigError("expert data has no episodes");
  return std::accumulate(episode_costs.begin(), episode_costs.end(), 0.0) /
         static_cast<double>(episode_costs.size());
}

void LearnerConfig::validate() const {
  if (algorithm == Algorithm::kBc) throw ConfigError("behaviour cloning has its own trainer");
  if (hidden.empty()) throw ConfigError("at least one hidden layer is required");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (generator_steps == 0) throw ConfigError("generator steps must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must be in (0,1)");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) throw ConfigError("GAE lambda must be in [0,1]");
  if (!(lambda_init >= 0.0)) throw ConfigError("initial lambda must be nonnegative");
  if (!(lambda_lr > 0.0) || !(meta_lr > 0.0) || !(value_lr > 0.0)) throw ConfigError("learning rates must be positive");
  if (!(meta_train_fraction > 0.0 && meta_train_fraction < 1.0)) throw ConfigError("meta split must be in (0,1)");
  trust_region.validate();
}

ImitationLearner::ImitationLearner(LearnerConfig config, std::unique_ptr<env::Environment> env,
                                   Demonstrations expert, std::uint64_t seed)
    : config_(std::move(config)), env_(std::move(env)), expert_(std::move(expert)), master_(seed) {
  config_.validate();
  const auto& spec = env_->spec();
  const std::size_t obs = spec.observation_dim;
  if (expert_.observations.cols() != obs) throw ShapeError("expert observations do not match the environment");
  if (expert_.size() == 0) throw ConfigError("expert data is empty");

  const bool discrete = spec.action_space.kind == env::ActionKind::kDiscrete;
  const std::size_t out = discrete ? spec.action_space.n : spec.action_space.dim;
  Rng policy_rng = master_.split(Stream::kPolicyInit);
  Rng value_rng = master_.split(Stream::kValueInit);
  Rng vr_rng = value_rng.split(0);
  Rng vd_rng = value_rng.split(1);
  Rng disc_rng = master_.split(Stream::kDiscriminatorInit);
  state_.policy = nn::MlpNet(obs, config_.hidden, out,
                             discrete ? nn::Head::kCategoricalPolicy : nn::Head::kGaussianPolicy, policy_rng);
  state_.reward_value = nn::MlpNet(obs, config_.hidden, 1, nn::Head::kScalarValue, vr_rng);
  state_.cost_value = nn::MlpNet(obs, config_.hidden, 1, nn::Head::kScalarValue, vd_rng);
  state_.reward_adam = nn::AdamState(state_.reward_value.params().size(), config_.value_lr);
  state_.cost_adam = nn::AdamState(state_.cost_value.params().size(), config_.value_lr);
  state_.disc = gail::Discriminator(obs, spec.action_space, config_.hidden, disc_rng, config_.discriminator);
  state_.lagrangian = LagrangianState(config_.lambda_init, config_.lambda_lr, config_.lambda_mode);

  expert_inputs_ = state_.disc.encode(expert_.observations, expert_.actions);
  if (config_.discriminator.absorbing) {
    const nn::Matrix absorbing = state_.disc.absorbing_inputs(expert_.terminal_episodes);
    for (std::size_t i = 0; i < absorbing.rows(); ++i) expert_inputs_.append_row(absorbing.row(i));
  }
  expert_cost_ = expert_.mean_cost();
  cost_target_ = expert_cost_;
  if (config_.algorithm == Algorithm::kLgail) {
    cost_target_ = config_.cost_limit_override ? *config_.cost_limit_override
                                               : lgail_cost_limit(expert_.episode_costs, config_.lgail_fraction);
  }
}

nn::Matrix ImitationLearner::expert_minibatch(std::size_t n, Rng& rng) const {
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = rng.below(expert_inputs_.rows());
  return expert_inputs_.gather(idx);
}

void ImitationLearner::check_finite() const {
  if (!state_.policy.params().all_finite() || !state_.reward_value.params().all_finite() ||
      !state_.cost_value.params().all_finite() || !state_.disc.net().params().all_finite() ||
      !std::isfinite(state_.lagrangian.lambda)) {
    throw NonFiniteError("non-finite parameters after iteration " + std::to_string(state_.iteration));
  }
}

IterationRecord ImitationLearner::iterate() {
  State saved = state_;
  try {
    IterationRecord rec = step();
    check_finite();
    return rec;
  } catch (...) {
    state_ = std::move(saved);
    throw;
  }
}

IterationRecord ImitationLearner::step() {
  const std::size_t it = state_.iteration;
  const Algorithm algo = config_.algorithm;
  const std::uint64_t rollout_seed = master_.split(Stream::kRollout).split(it).next_u64();
  Rng shuffle = master_.split(Stream::kShuffle).split(it);
  Rng expert_rng = master_.split(Stream::kExpertSample).split(it);

  // Collect and label with one discriminator snapshot.
  rollout::Batch batch = rollout::collect(state_.policy, *env_, config_.batch_size, rollout_seed);
  rollout::label_surrogate_reward(batch, state_.disc);
  const rollout::BatchStats stats = batch.stats;

  IterationRecord rec;
  rec.iteration = it;
  if (stats.episodes == 0) rec.warning = "no complete episode in batch";
  const double j_k = stats.episodes > 0 ? stats.mean_cost : stats.total_cost;

  rollout::Batch learn = batch;
  // A terminal hands over to an absorbing state that keeps earning its own
  // surrogate reward; fold that tail into the terminal step.
  std::size_t terminals = 0;
  if (config_.discriminator.absorbing) {
    const double r_abs = state_.disc.surrogate_rewards(state_.disc.absorbing_inputs(1))[0];
    const double tail = config_.gamma * r_abs / (1.0 - config_.gamma);
    for (std::size_t t = 0; t < learn.size(); ++t) {
      if (!learn.terminal(t)) continue;
      learn.surrogate_rewards[t] += tail;
      ++terminals;
    }
  }
  if (config_.zero_cost_channel) std::fill(learn.costs.begin(), learn.costs.end(), 0.0);
  rollout::AdvantageBuffer adv = rollout::compute_advantages(learn, state_.reward_value, state_.cost_value,
                                                             config_.gamma, config_.gae_lambda);

  // MALM trains policy and values on whole episodes from the front of the batch.
  std::vector<std::size_t> train_rows(learn.size());
  std::iota(train_rows.begin(), train_rows.end(), std::size_t{0});
  std::vector<std::size_t> val_rows;
  if (algo == Algorithm::kMalm) {
    const double want = config_.meta_train_fraction * static_cast<double>(learn.size());
    train_rows.clear();
    for (const auto& ep : learn.episodes) {
      auto& dst = static_cast<double>(train_rows.size()) < want ? train_rows : val_rows;
      for (std::size_t t = ep.start; t < ep.start + ep.length; ++t) dst.push_back(t);
    }
  }

  trpo::SurrogateSpec spec;
  spec.entropy_coef = config_.policy_entropy;
  switch (algo) {
    case Algorithm::kCcil:
    case Algorithm::kMalm:
    case Algorithm::kLgail:
      spec.mode = trpo::SurrogateMode::kPenalized;
      spec.lambda = state_.lagrangian.lambda;
      break;
    case Algorithm::kGail: spec.mode = trpo::SurrogateMode::kRewardOnly; break;
    case Algorithm::kCvag:
      spec.mode = cvag_branch(j_k, expert_cost_) == CvagBranch::kMaximizeReturn
                      ? trpo::SurrogateMode::kRewardOnly
                      : trpo::SurrogateMode::kCostMinimizing;
      break;
    case Algorithm::kBc: throw ConfigError("behaviour cloning has its own trainer");
  }
  rec.branch = trpo::mode_name(spec.mode);

  trpo::PolicyBatch pb;
  pb.states = learn.observations.gather(train_rows);
  pb.actions = learn.actions.gather(train_rows);
  const auto train_adv = adv.select(train_rows);
  pb.reward_advantages = train_adv.reward_advantages;
  pb.cost_advantages = train_adv.cost_advantages;
  for (std::size_t pass = 0; pass < config_.generator_steps; ++pass) {
    trpo::StepResult r = trpo::trust_region_step(state_.policy, pb, spec, config_.trust_region);
    if (!r.report.error.empty()) {
      if (!rec.warning.empty()) rec.warning += "; ";
      rec.warning += "trust region: " + r.report.error;
    }
    if (r.report.accepted) {
      state_.policy.set_params(std::move(r.params));
      rec.kl = r.report.kl;
      ++rec.accepted_steps;
    }
  }

  fit_value_networks(pb.states, train_adv.reward_to_go, train_adv.cost_to_go, state_.reward_value,
                     state_.cost_value, state_.reward_adam, state_.cost_adam, config_.value_minibatch, shuffle);

  nn::Matrix learner_inputs = rollout::discriminator_inputs(batch, state_.disc);
  if (terminals > 0) {
    const nn::Matrix absorbing = state_.disc.absorbing_inputs(terminals);
    for (std::size_t i = 0; i < absorbing.rows(); ++i) learner_inputs.append_row(absorbing.row(i));
  }
  for (std::size_t k = 0; k < config_.discriminator_steps; ++k) {
    gail::discriminator_update(state_.disc, learner_inputs, expert_minibatch(learner_inputs.rows(), expert_rng));
  }

  const bool uses_lambda = algo == Algorithm::kCcil || algo == Algorithm::kMalm || algo == Algorithm::kLgail;
  if (uses_lambda && !config_.freeze_lambda) {
    const double j_learn = config_.zero_cost_channel ? 0.0 : j_k;
    const double target = config_.zero_cost_channel ? 0.0 : cost_target_;
    state_.lagrangian = lambda_update(state_.lagrangian, j_learn, target);
    if (algo == Algorithm::kMalm) {
      if (val_rows.empty()) {
        if (!rec.warning.empty()) rec.warning += "; ";
        rec.warning += "empty validation split, meta step skipped";
      } else {
        std::vector<double> a, d;
        for (std::size_t t : val_rows) {
          a.push_back(adv.reward_advantages[t]);
          d.push_back(learn.costs[t]);
        }
        state_.lagrangian.lambda = meta_step(state_.lagrangian.lambda, a, d, config_.meta_lr);
      }
    }
  }

  state_.total_steps += stats.steps;
  state_.total_cost += stats.total_cost;
  state_.iteration = it + 1;

  rec.steps = state_.total_steps;
  rec.episodes = stats.episodes;
  rec.mean_true_return = stats.mean_true_return;
  rec.mean_surrogate_return = stats.mean_surrogate_return;
  rec.mean_cost = j_k;
  rec.lambda = uses_lambda ? state_.lagrangian.lambda : 0.0;
  rec.cost_rate = state_.total_cost / static_cast<double>(state_.total_steps);
  return rec;
}

nn::Checkpoint ImitationLearner::checkpoint() const {
  nn::Checkpoint c;
  c.vectors["policy"] = state_.policy.params();
  c.vectors["reward_value"] = state_.reward_value.params();
  c.vectors["cost_value"] = state_.cost_value.params();
  c.vectors["discriminator"] = state_.disc.net().params();
  c.scalars["lambda"] = state_.lagrangian.lambda;
  c.scalars["iteration"] = static_cast<double>(state_.iteration);
  c.scalars["total_steps"] = static_cast<double>(state_.total_steps);
  c.scalars["total_cost"] = state_.total_cost;
  return c;
}

}  // namespace ccil::learners
