#include "ccil/metrics/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ccil/common/errors.hpp"
#include "ccil/learners/behavior_cloning.hpp"
#include "ccil/metrics/svg_plot.hpp"
#include "ccil/nn/serialize.hpp"
#include "ccil/rollout/batch.hpp"

#ifndef CCIL_GIT_DESCRIBE
#define CCIL_GIT_DESCRIBE "unknown"
#endif

namespace ccil::metrics {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

nlohmann::json json_num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

double per_iteration_r_pen(double r, double r_e, double j, double j_e, double kappa) {
  return j_e > 0.0 && r_e != 0.0 ? penalized_return(r, r_e, j, j_e, kappa) : std::nan("");
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw FormatError("cannot write " + p.string());
  f << s;
}

std::vector<learners::IterationRecord> run_bc(const RunConfig& config, std::uint64_t master,
                                              const learners::Demonstrations& demos, env::Environment& env,
                                              nn::Checkpoint& ckpt) {
  const auto& spec = env.spec();
  const bool discrete = spec.action_space.kind == env::ActionKind::kDiscrete;
  Rng root(master);
  Rng init = root.split(Stream::kPolicyInit);
  nn::MlpNet policy(spec.observation_dim, config.learner.hidden, discrete ? spec.action_space.n : spec.action_space.dim,
                    discrete ? nn::Head::kCategoricalPolicy : nn::Head::kGaussianPolicy, init);
  auto bc = learners::bc_train(policy, demos.observations, demos.actions, config.bc, root.split(Stream::kSplit));
  ckpt.vectors["policy"] = bc.policy.params();
  ckpt.scalars["best_epoch"] = static_cast<double>(bc.best_epoch);
  ckpt.scalars["best_validation_nll"] = bc.best_validation_nll;

  std::vector<learners::IterationRecord> out;
  const std::size_t evals = std::min(config.iterations, config.metric_window);
  std::size_t steps = 0;
  double cost = 0.0;
  for (std::size_t i = 0; i < evals; ++i) {
    auto b = rollout::collect(bc.policy, env, config.learner.batch_size, root.split(Stream::kRollout).split(i).next_u64());
    steps += b.stats.steps;
    cost += b.stats.total_cost;
    learners::IterationRecord r;
    r.iteration = i;
    r.steps = steps;
    r.episodes = b.stats.episodes;
    r.mean_true_return = b.stats.mean_true_return;
    r.mean_cost = b.stats.episodes > 0 ? b.stats.mean_cost : b.stats.total_cost;
    r.cost_rate = cost / static_cast<double>(steps);
    r.branch = "bc";
    out.push_back(r);
  }
  return out;
}

}  // namespace

std::string progress_header() {
  return "iteration,steps,mean_true_return,mean_cost,lambda,kl,cost_rate,r_pen,r_rec,cost_vio\n";
}

std::string progress_row(const learners::IterationRecord& r, double r_e, double j_e, double kappa) {
  std::string s = std::to_string(r.iteration) + "," + std::to_string(r.steps) + "," + num(r.mean_true_return) + "," +
                  num(r.mean_cost) + "," + num(r.lambda) + "," + num(r.kl) + "," + num(r.cost_rate) + "," +
                  num(per_iteration_r_pen(r.mean_true_return, r_e, r.mean_cost, j_e, kappa)) + "," +
                  num(r_e != 0.0 ? recovered_return(r.mean_true_return, r_e) : std::nan("")) + "," +
                  num(cost_violation(r.mean_cost, j_e)) + "\n";
  return s;
}

fs::path expert_path_for(const RunConfig& config) {
  if (!config.expert_path.empty()) return config.expert_path;
  return fs::path(config.output_dir) / "experts" / (config.env_name + ".jsonl");
}

oracle::ExpertDataset forge_expert(const RunConfig& config, const Logger& log) {
  auto env = make_environment(config);
  oracle::SolverConfig solver = config.solver;
  solver.dataset_episodes = config.expert_episodes;
  auto progress = [&](const oracle::ForgeProgress& p) {
    if (log && p.iteration % 10 == 0) {
      log("forge iteration " + std::to_string(p.iteration) + " reward " + num(p.window_reward) + " cost " +
          num(p.window_cost) + " lambda " + num(p.lambda));
    }
  };
  return oracle::train_expert(*env, config.budget(), solver, config.expert_seed, progress);
}

oracle::ExpertDataset obtain_expert(const RunConfig& config, bool forge_if_missing, const Logger& log) {
  const fs::path path = expert_path_for(config);
  if (fs::exists(path)) {
    auto ds = oracle::load_dataset(path);
    const auto env = make_environment(config);
    if (ds.spec_hash != fnv1a64(env->describe())) {
      throw ConfigError("expert dataset " + path.string() + " was forged for a different environment spec");
    }
    return ds;
  }
  if (!forge_if_missing) {
    throw ConfigError("expert dataset " + path.string() + " not found; create it with `ccil expert-forge --env " +
                      config.env_name + " --budget " + num(config.budget()) + " --episodes " +
                      std::to_string(config.expert_episodes) + " --out " + path.string() +
                      "` or pass --forge-expert");
  }
  auto ds = forge_expert(config, log);
  oracle::save_dataset(path, ds);
  if (log) log("saved expert dataset to " + path.string());
  return ds;
}

RunResult run_single(const RunConfig& config, learners::Algorithm algorithm, std::uint64_t seed,
                     const oracle::ExpertDataset& expert, const fs::path& out_root, const Logger& log) {
  RunResult res;
  const std::string algo = learners::algorithm_name(algorithm);
  res.dir = out_root / algo / config.env_name / std::to_string(seed);
  fs::create_directories(res.dir);
  fs::remove(res.dir / "FAILED");

  const learners::Demonstrations demos = expert.demonstrations();
  const double r_e = demos.mean_return;
  const double j_e = demos.mean_cost();
  const fs::path expert_file = expert_path_for(config);

  RunConfig effective = config;
  effective.algorithm = algorithm;
  effective.seeds = {seed};
  nlohmann::json manifest;
  manifest["algorithm"] = algo;
  manifest["env"] = config.env_name;
  manifest["seed"] = seed;
  manifest["git_describe"] = CCIL_GIT_DESCRIBE;
  manifest["config"] = serialize_config(effective);
  manifest["env_spec"] = make_environment(config)->describe();
  manifest["expert_dataset"] = expert_file.string();
  manifest["expert_dataset_hash"] = fs::exists(expert_file) ? oracle::file_hash(expert_file) : std::string();
  manifest["expert_spec_hash"] = oracle::hex64(expert.spec_hash);
  write_text(res.dir / "manifest.json", manifest.dump(2) + "\n");

  std::ofstream csv(res.dir / "progress.csv", std::ios::binary);
  csv << progress_header();
  const std::uint64_t master = config.master_seed(seed);
  try {
    if (algorithm == learners::Algorithm::kBc) {
      auto env = make_environment(config);
      nn::Checkpoint ckpt;
      res.records = run_bc(config, master, demos, *env, ckpt);
      for (const auto& r : res.records) csv << progress_row(r, r_e, j_e, config.kappa);
      nn::save_checkpoint(res.dir / "checkpoint_final.ckpt", ckpt);
    } else {
      learners::LearnerConfig lc = config.learner;
      lc.algorithm = algorithm;
      learners::ImitationLearner learner(lc, make_environment(config), demos, master);
      std::size_t streak = 0;
      for (std::size_t i = 0; i < config.iterations; ++i) {
        const auto rec = learner.iterate();
        res.records.push_back(rec);
        csv << progress_row(rec, r_e, j_e, config.kappa);
        csv.flush();
        if (log && (i % 10 == 0 || !rec.warning.empty())) {
          log(algo + "/" + std::to_string(seed) + " it " + std::to_string(i) + " R " + num(rec.mean_true_return) +
              " J " + num(rec.mean_cost) + " lambda " + num(rec.lambda) +
              (rec.warning.empty() ? "" : " [" + rec.warning + "]"));
        }
        if (config.checkpoint_every > 0 && (i + 1) % config.checkpoint_every == 0) {
          nn::save_checkpoint(res.dir / ("checkpoint_" + std::to_string(i + 1) + ".ckpt"), learner.checkpoint());
        }
        const bool good = recovered_return(rec.mean_true_return, r_e) >= config.stop_recovered_return &&
                          cost_violation(rec.mean_cost, j_e) == 0.0;
        streak = good ? streak + 1 : 0;
        if (config.early_stop && streak >= config.stop_patience) {
          res.early_stopped = true;
          break;
        }
      }
      nn::save_checkpoint(res.dir / "checkpoint_final.ckpt", learner.checkpoint());
    }
    res.metrics = final_metrics(res.records, r_e, j_e, config.kappa, config.metric_window);
  } catch (const std::exception& e) {
    res.failed = true;
    res.error = e.what();
    write_text(res.dir / "FAILED", res.error + "\n");
    if (log) log(algo + "/" + std::to_string(seed) + " FAILED: " + res.error);
    return res;
  }

  nlohmann::json m;
  m["algorithm"] = algo;
  m["env"] = config.env_name;
  m["seed"] = seed;
  m["R"] = json_num(res.metrics.r);
  m["J"] = json_num(res.metrics.j);
  m["R_E"] = json_num(r_e);
  m["J_E"] = json_num(j_e);
  m["r_pen"] = json_num(res.metrics.r_pen);
  m["r_rec"] = json_num(res.metrics.r_rec);
  m["cost_vio"] = json_num(res.metrics.cost_vio);
  m["cost_rate"] = json_num(res.metrics.cost_rate);
  m["kappa"] = res.metrics.kappa;
  m["window"] = res.metrics.window;
  m["iterations"] = res.metrics.iterations;
  m["early_stopped"] = res.early_stopped;
  if (res.metrics.window_shrunk) {
    m["warning"] = "run shorter than the metric window; averaged over all " + std::to_string(res.metrics.window) +
                   " iterations";
    if (log) log(algo + "/" + std::to_string(seed) + ": " + m["warning"].get<std::string>());
  }
  write_text(res.dir / "metrics.json", m.dump(2) + "\n");
  if (config.plots) {
    write_text(res.dir / "progress.svg",
               render_progress_svg(res.records, j_e, algo + " / " + config.env_name + " / seed " + std::to_string(seed)));
  }
  return res;
}

std::vector<SummaryRow> aggregate(const fs::path& out_root) {
  std::map<std::pair<std::string, std::string>, std::vector<nlohmann::json>> groups;
  if (!fs::exists(out_root)) throw ConfigError("output directory " + out_root.string() + " does not exist");
  for (const auto& algo_dir : fs::directory_iterator(out_root)) {
    if (!algo_dir.is_directory()) continue;
    for (const auto& env_dir : fs::directory_iterator(algo_dir.path())) {
      if (!env_dir.is_directory()) continue;
      for (const auto& seed_dir : fs::directory_iterator(env_dir.path())) {
        const fs::path mj = seed_dir.path() / "metrics.json";
        if (!fs::exists(mj) || fs::exists(seed_dir.path() / "FAILED")) continue;
        std::ifstream f(mj);
        groups[{algo_dir.path().filename().string(), env_dir.path().filename().string()}].push_back(
            nlohmann::json::parse(f));
      }
    }
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, runs] : groups) {
    SummaryRow row;
    row.algorithm = key.first;
    row.env = key.second;
    row.seeds = runs.size();
    std::vector<double> pen, rec, vio;
    auto get = [](const nlohmann::json& j, const char* k) {
      return j.at(k).is_null() ? std::nan("") : j.at(k).get<double>();
    };
    for (const auto& j : runs) {
      pen.push_back(get(j, "r_pen"));
      rec.push_back(get(j, "r_rec"));
      vio.push_back(get(j, "cost_vio"));
    }
    row.r_pen = mean_std(pen);
    row.r_rec = mean_std(rec);
    row.cost_vio = mean_std(vio);
    rows.push_back(row);
  }
  return rows;
}

std::string format_summary(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "| Algorithm | Env | Seeds | R_pen | R_rec | Cost-Vio |\n";
  os << "|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    os << "| " << r.algorithm << " | " << r.env << " | " << r.seeds << " | " << r.r_pen.mean << " ± " << r.r_pen.std
       << " | " << r.r_rec.mean << " ± " << r.r_rec.std << " | " << r.cost_vio.mean << " ± " << r.cost_vio.std
       << " |\n";
  }
  return os.str();
}

void write_summary(const fs::path& out_root, const std::vector<SummaryRow>& rows) {
  write_text(out_root / "summary.md", format_summary(rows));
  std::string csv = "algorithm,env,seeds,r_pen_mean,r_pen_std,r_rec_mean,r_rec_std,cost_vio_mean,cost_vio_std\n";
  for (const auto& r : rows) {
    csv += r.algorithm + "," + r.env + "," + std::to_string(r.seeds) + "," + num(r.r_pen.mean) + "," +
           num(r.r_pen.std) + "," + num(r.r_rec.mean) + "," + num(r.r_rec.std) + "," + num(r.cost_vio.mean) + "," +
           num(r.cost_vio.std) + "\n";
  }
  write_text(out_root / "summary.csv", csv);
}

ExperimentResult run_experiment(const RunConfig& config, const std::vector<learners::Algorithm>& algorithms,
                                bool forge_if_missing, const Logger& log) {
  config.validate();
  if (algorithms.empty()) throw ConfigError("no algorithm selected");
  const auto expert = obtain_expert(config, forge_if_missing, log);
  ExperimentResult out;
  const fs::path root(config.output_dir);
  for (auto algo : algorithms) {
    for (auto seed : config.seeds) out.runs.push_back(run_single(config, algo, seed, expert, root, log));
  }
  out.summary = aggregate(root);
  write_summary(root, out.summary);
  return out;
}

}  // namespace ccil::metrics
