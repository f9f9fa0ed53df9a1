#include "ccil/oracle/expert.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "ccil/common/errors.hpp"
#include "ccil/common/rng.hpp"
#include "ccil/learners/lagrangian.hpp"
#include "ccil/learners/value_fit.hpp"
#include "ccil/nn/policy_head.hpp"
#include "ccil/rollout/gae.hpp"
#include "ccil/rollout/jsonl.hpp"
#include "ccil/trpo/trust_region.hpp"

namespace ccil::oracle {

struct PrivilegedView {
  static env::RewardAccess token() { return {}; }
};

namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd m;
  if (v.empty()) return m;
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(s / static_cast<double>(v.size()));
  return m;
}

double window_mean(const std::deque<double>& d, std::size_t from, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = from; i < from + n; ++i) s += d[i];
  return s / static_cast<double>(n);
}

}  // namespace

std::string SolverConfig::describe() const {
  std::ostringstream os;
  os << "hidden=";
  for (std::size_t i = 0; i < hidden.size(); ++i) os << (i ? "," : "") << hidden[i];
  os << " batch=" << batch_size << " max_iterations=" << max_iterations << " gamma=" << gamma
     << " gae_lambda=" << gae_lambda << " max_kl=" << max_kl << " lambda_lr=" << lambda_lr
     << " window=" << window_episodes << " episodes=" << dataset_episodes;
  return os.str();
}

double feasibility_threshold(double budget) { return std::max(1.05 * budget, 0.05); }

std::vector<double> ExpertDataset::episode_costs() const {
  std::vector<double> c;
  for (const auto& ep : steps.episodes) c.push_back(ep.cost_sum);
  return c;
}

std::vector<double> ExpertDataset::episode_returns() const {
  const auto token = PrivilegedView::token();
  std::vector<double> r;
  for (const auto& ep : steps.episodes) {
    double s = 0.0;
    for (std::size_t t = ep.start; t < ep.start + ep.length; ++t) s += steps.true_rewards[t].read(token);
    r.push_back(s);
  }
  return r;
}

DatasetSummary ExpertDataset::recompute_summary() const {
  DatasetSummary s;
  s.episodes = steps.episodes.size();
  const MeanStd r = mean_std(episode_returns());
  const MeanStd c = mean_std(episode_costs());
  s.reward_mean = r.mean;
  s.reward_std = r.std;
  s.cost_mean = c.mean;
  s.cost_std = c.std;
  return s;
}

learners::Demonstrations ExpertDataset::demonstrations() const {
  learners::Demonstrations d;
  d.observations = steps.observations;
  d.actions = steps.actions;
  d.episode_costs = episode_costs();
  d.mean_return = recompute_summary().reward_mean;
  for (std::size_t t = 0; t < steps.size(); ++t) d.terminal_episodes += steps.terminal(t) ? 1 : 0;
  return d;
}

ExpertDataset train_expert(const env::Environment& env_in, double budget, const SolverConfig& cfg, std::uint64_t seed,
                           const std::function<void(const ForgeProgress&)>& progress) {
  if (!(budget >= 0.0) || !std::isfinite(budget)) throw ConfigError("expert budget must be a nonnegative number");
  if (cfg.dataset_episodes == 0 || cfg.window_episodes == 0) throw ConfigError("episode counts must be positive");
  auto env = env_in.clone();
  const auto& spec = env->spec();
  const bool discrete = spec.action_space.kind == env::ActionKind::kDiscrete;
  const std::size_t obs = spec.observation_dim;
  const std::size_t out = discrete ? spec.action_space.n : spec.action_space.dim;
  const auto token = PrivilegedView::token();
  const double threshold = feasibility_threshold(budget);

  Rng master(seed);
  Rng prng = master.split(Stream::kPolicyInit), vrng = master.split(Stream::kValueInit);
  Rng vr_rng = vrng.split(0), vd_rng = vrng.split(1);
  nn::MlpNet policy(obs, cfg.hidden, out, discrete ? nn::Head::kCategoricalPolicy : nn::Head::kGaussianPolicy, prng);
  nn::MlpNet vr(obs, cfg.hidden, 1, nn::Head::kScalarValue, vr_rng);
  nn::MlpNet vd(obs, cfg.hidden, 1, nn::Head::kScalarValue, vd_rng);
  nn::AdamState ar(vr.params().size(), cfg.value_lr), ad(vd.params().size(), cfg.value_lr);
  learners::LagrangianState lag(cfg.lambda_init, cfg.lambda_lr);
  trpo::TrustRegionConfig tr;
  tr.max_kl = cfg.max_kl;

  std::deque<double> costs, rewards;  // last 2 windows of complete episodes
  double best_cost = std::numeric_limits<double>::infinity();
  double best_reward = 0.0;
  bool done = false;
  for (std::size_t it = 0; it < cfg.max_iterations && !done; ++it) {
    rollout::Batch b = rollout::collect(policy, *env, cfg.batch_size, master.split(Stream::kRollout).split(it).next_u64());
    b.surrogate_rewards.resize(b.size());
    for (std::size_t t = 0; t < b.size(); ++t) b.surrogate_rewards[t] = b.true_rewards[t].read(token);
    const auto adv = rollout::compute_advantages(b, vr, vd, cfg.gamma, cfg.gae_lambda);

    trpo::PolicyBatch pb{b.observations, b.actions, adv.reward_advantages, adv.cost_advantages};
    trpo::SurrogateSpec sp{trpo::SurrogateMode::kPenalized, lag.lambda, 0.0};
    auto step = trpo::trust_region_step(policy, pb, sp, tr);
    if (step.report.accepted) policy.set_params(std::move(step.params));
    Rng shuffle = master.split(Stream::kShuffle).split(it);
    learners::fit_value_networks(b.observations, adv.reward_to_go, adv.cost_to_go, vr, vd, ar, ad,
                                 cfg.value_minibatch, shuffle);
    const double j_k = b.stats.episodes > 0 ? b.stats.mean_cost : b.stats.total_cost;
    lag = learners::lambda_update(lag, j_k, budget);

    for (const auto& ep : b.episodes) {
      if (!ep.complete) continue;
      costs.push_back(ep.cost_sum);
      double r = 0.0;
      for (std::size_t t = ep.start; t < ep.start + ep.length; ++t) r += b.true_rewards[t].read(token);
      rewards.push_back(r);
    }
    while (costs.size() > 2 * cfg.window_episodes) {
      costs.pop_front();
      rewards.pop_front();
    }
    const std::size_t w = std::min(cfg.window_episodes, costs.size());
    if (w == 0) continue;
    const double wc = window_mean(costs, costs.size() - w, w);
    const double wr = window_mean(rewards, rewards.size() - w, w);
    if (wc < best_cost) {
      best_cost = wc;
      best_reward = wr;
    }
    if (progress) progress({it, wr, wc, lag.lambda});
    if (it + 1 < cfg.min_iterations || costs.size() < 2 * cfg.window_episodes) continue;
    const double prev_r = window_mean(rewards, 0, cfg.window_episodes);
    const bool plateau = std::abs(wr - prev_r) <= cfg.plateau_tolerance * std::max(1.0, std::abs(wr));
    done = wc <= threshold && plateau;
  }
  if (!done) {
    std::ostringstream os;
    os << "expert did not reach feasibility (window cost <= " << threshold << ") within " << cfg.max_iterations
       << " iterations; best window cost " << best_cost << " with reward " << best_reward;
    throw Error(os.str());
  }

  ExpertDataset ds;
  ds.env_description = env->describe();
  ds.spec_hash = fnv1a64(ds.env_description);
  ds.gamma = spec.discount;
  ds.budget = budget;
  ds.seed = seed;
  ds.solver_description = cfg.describe();
  Rng sample_seeds = master.split(Stream::kExpertSample);
  for (std::size_t k = 0; k < cfg.max_resamples; ++k) {
    ds.steps = rollout::collect_episodes(policy, *env, cfg.dataset_episodes, sample_seeds.next_u64());
    ds.summary = ds.recompute_summary();
    if (ds.summary.cost_mean <= threshold) return ds;
  }
  throw Error("no sampled expert dataset met the cost threshold " + std::to_string(threshold));
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

void write_dataset(std::ostream& os, const ExpertDataset& ds) {
  nlohmann::json h;
  h["format"] = "ccil-expert";
  h["version"] = 1;
  h["env"] = ds.env_description;
  h["spec_hash"] = hex64(ds.spec_hash);
  h["gamma"] = ds.gamma;
  h["budget"] = ds.budget;
  h["seed"] = ds.seed;
  h["solver"] = ds.solver_description;
  h["episodes"] = ds.summary.episodes;
  h["steps"] = ds.steps.size();
  h["reward_mean"] = ds.summary.reward_mean;
  h["reward_std"] = ds.summary.reward_std;
  h["cost_mean"] = ds.summary.cost_mean;
  h["cost_std"] = ds.summary.cost_std;
  os << h.dump() << '\n';
  rollout::write_jsonl(os, ds.steps);
}

void save_dataset(const std::filesystem::path& path, const ExpertDataset& ds) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot write " + path.string());
  write_dataset(f, ds);
  if (!f) throw FormatError("write failed for " + path.string());
}

ExpertDataset read_dataset(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("expert dataset is empty");
  ExpertDataset ds;
  std::size_t declared_steps = 0;
  try {
    const auto h = nlohmann::json::parse(line);
    if (h.at("format") != "ccil-expert" || h.at("version") != 1) throw FormatError("not a version-1 expert dataset");
    ds.env_description = h.at("env").get<std::string>();
    ds.spec_hash = std::stoull(h.at("spec_hash").get<std::string>(), nullptr, 16);
    ds.gamma = h.at("gamma").get<double>();
    ds.budget = h.at("budget").get<double>();
    ds.seed = h.at("seed").get<std::uint64_t>();
    ds.solver_description = h.at("solver").get<std::string>();
    ds.summary.episodes = h.at("episodes").get<std::size_t>();
    ds.summary.reward_mean = h.at("reward_mean").get<double>();
    ds.summary.reward_std = h.at("reward_std").get<double>();
    ds.summary.cost_mean = h.at("cost_mean").get<double>();
    ds.summary.cost_std = h.at("cost_std").get<double>();
    declared_steps = h.at("steps").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad expert dataset header: ") + e.what());
  }
  if (fnv1a64(ds.env_description) != ds.spec_hash) throw FormatError("expert dataset spec hash mismatch");

  rollout::Batch& b = ds.steps;
  rollout::Episode ep;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto obs = j.at("obs").get<std::vector<double>>();
      const auto act = j.at("act").get<std::vector<double>>();
      b.observations.append_row(obs);
      b.actions.append_row(act);
      b.log_probs.push_back(j.at("logp").get<double>());
      b.true_rewards.emplace_back(j.at("r_true").get<double>());
      const double c = j.at("cost").get<double>();
      b.costs.push_back(c);
      const bool d = j.at("done").get<bool>();
      b.dones.push_back(d ? 1 : 0);
      b.truncated.push_back(j.at("truncated").get<bool>() ? 1 : 0);
      ++ep.length;
      ep.cost_sum += c;
      if (d) {
        ep.complete = true;
        b.episodes.push_back(ep);
        ep = rollout::Episode{};
        ep.start = b.size();
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad expert dataset step: ") + e.what());
    }
  }
  if (ep.length > 0) throw FormatError("expert dataset ends inside an episode");
  if (b.size() != declared_steps) throw FormatError("expert dataset step count differs from its header");
  b.validate();
  b.stats = rollout::summarize(b);
  const DatasetSummary s = ds.recompute_summary();
  auto close = [](double a, double c) { return std::abs(a - c) <= 1e-9 * std::max(1.0, std::abs(c)); };
  if (s.episodes != ds.summary.episodes || !close(s.cost_mean, ds.summary.cost_mean) ||
      !close(s.reward_mean, ds.summary.reward_mean) || !close(s.cost_std, ds.summary.cost_std) ||
      !close(s.reward_std, ds.summary.reward_std)) {
    throw FormatError("expert dataset summary does not match its steps");
  }
  return ds;
}

ExpertDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open expert dataset " + path.string());
  return read_dataset(f);
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return hex64(fnv1a64(ss.str()));
}

std::string summary_block(const std::string& env_name, const ExpertDataset& ds) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "Environment | Dataset Size | Reward            | Cost\n";
  os << env_name << " | " << ds.summary.episodes << " | " << ds.summary.reward_mean << " ± " << ds.summary.reward_std
     << " | " << ds.summary.cost_mean << " ± " << ds.summary.cost_std << "\n";
  return os.str();
}

}  // namespace ccil::oracle
