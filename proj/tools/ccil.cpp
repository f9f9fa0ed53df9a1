// Command-line front end: train, expert-forge, report, oracle-check.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "ccil/common/errors.hpp"
#include "ccil/metrics/config.hpp"
#include "ccil/metrics/experiment.hpp"
#include "ccil/oracle/expert.hpp"
#include "ccil/oracle/suite.hpp"

namespace {

using ccil::metrics::RunConfig;

std::vector<ccil::learners::Algorithm> parse_algorithms(const std::string& s) {
  std::vector<ccil::learners::Algorithm> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ccil::learners::parse_algorithm(item));
  return out;
}

void apply_overrides(RunConfig& c, const std::vector<std::string>& sets) {
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ccil::ConfigError("--set expects key=value, got '" + kv + "'");
    ccil::metrics::set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
}

void log_line(const std::string& s) { std::cerr << s << std::endl; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost-constrained imitation learning toolkit"};
  app.require_subcommand(1);

  std::string config_path, algos = "ccil", env_name, seeds, out_dir;
  std::vector<std::string> sets;
  std::size_t iterations = 0;
  bool forge = false, plots = false, quiet = false;
  auto* train = app.add_subcommand("train", "Train one or more algorithms over seeds");
  train->add_option("--algo", algos, "Comma list of ccil, malm, cvag, gail, lgail, bc")->capture_default_str();
  train->add_option("--env", env_name, "grid or point");
  train->add_option("--config", config_path, "key = value config file");
  train->add_option("--seeds", seeds, "Seed range 0..4 or list 0,1,2");
  train->add_option("--out", out_dir, "Output directory");
  train->add_option("--iterations", iterations, "Override the iteration budget");
  train->add_option("--set", sets, "Override a config key (key=value), repeatable");
  train->add_flag("--forge-expert", forge, "Forge the expert dataset if it is missing");
  train->add_flag("--plots", plots, "Write progress.svg per run");
  train->add_flag("--quiet", quiet, "Suppress progress logging");

  std::string f_env = "grid", f_out, f_config;
  double budget = -1.0;
  std::size_t episodes = 10;
  std::uint64_t f_seed = 0;
  std::vector<std::string> f_sets;
  auto* forge_cmd = app.add_subcommand("expert-forge", "Train a constrained expert on the true reward and sample a dataset");
  forge_cmd->add_option("--env", f_env, "grid or point")->capture_default_str();
  forge_cmd->add_option("--budget", budget, "Expert cost budget d0 (default: grid 2, point 10)");
  forge_cmd->add_option("--episodes", episodes, "Trajectories in the dataset")->capture_default_str();
  forge_cmd->add_option("--seed", f_seed, "Solver seed")->capture_default_str();
  forge_cmd->add_option("--out", f_out, "Dataset path (.jsonl)")->required();
  forge_cmd->add_option("--config", f_config, "Config file for environment and solver keys");
  forge_cmd->add_option("--set", f_sets, "Override a config key (key=value), repeatable");

  std::string r_out;
  auto* report = app.add_subcommand("report", "Re-aggregate per-seed metrics into a summary table");
  report->add_option("--out", r_out, "Output directory of a previous train")->required();

  std::size_t mdps = 50;
  std::uint64_t o_seed = 2024;
  bool verbose = false;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Validate occupancy-measure identities on random tabular MDPs");
  oracle_cmd->add_option("--mdps", mdps, "Number of random MDPs")->capture_default_str();
  oracle_cmd->add_option("--seed", o_seed, "Seed")->capture_default_str();
  oracle_cmd->add_flag("--verbose", verbose, "One line per MDP");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      RunConfig c = config_path.empty() ? RunConfig{} : ccil::metrics::load_config(config_path);
      if (!env_name.empty()) c.env_name = env_name;
      if (!seeds.empty()) c.seeds = ccil::metrics::parse_seeds(seeds);
      if (!out_dir.empty()) c.output_dir = out_dir;
      if (iterations > 0) c.iterations = iterations;
      if (plots) c.plots = true;
      apply_overrides(c, sets);
      auto result = ccil::metrics::run_experiment(c, parse_algorithms(algos), forge,
                                                  quiet ? ccil::metrics::Logger{} : ccil::metrics::Logger(log_line));
      std::cout << ccil::metrics::format_summary(result.summary);
      for (const auto& r : result.runs) {
        if (r.failed) {
          std::cerr << "run failed: " << r.dir.string() << ": " << r.error << "\n";
          return 2;
        }
      }
      return 0;
    }
    if (*forge_cmd) {
      RunConfig c = f_config.empty() ? RunConfig{} : ccil::metrics::load_config(f_config);
      c.env_name = f_env;
      if (budget >= 0.0) c.expert_budget = budget;
      c.expert_episodes = episodes;
      c.expert_seed = f_seed;
      apply_overrides(c, f_sets);
      auto ds = ccil::metrics::forge_expert(c, log_line);
      ccil::oracle::save_dataset(f_out, ds);
      std::cout << ccil::oracle::summary_block(c.env_name, ds);
      return 0;
    }
    if (*report) {
      auto rows = ccil::metrics::aggregate(r_out);
      ccil::metrics::write_summary(r_out, rows);
      std::cout << ccil::metrics::format_summary(rows);
      return 0;
    }
    if (*oracle_cmd) {
      ccil::oracle::SuiteConfig sc;
      sc.mdps = mdps;
      sc.seed = o_seed;
      auto rep = ccil::oracle::run_oracle_suite(sc, verbose ? &std::cout : nullptr);
      std::cout << "checked " << rep.checked << " MDPs\n"
                << "  worst total-mass error      " << rep.worst_mass_error << "\n"
                << "  worst flow-balance residual " << rep.worst_flow_residual << "\n"
                << "  worst round-trip error      " << rep.worst_round_trip << "\n"
                << "  worst entropy z-score       " << rep.worst_entropy_z << "\n"
                << "  worst saddle D* gap         " << rep.worst_saddle_gap << "\n"
                << "  worst lambda collinearity   " << rep.worst_lambda_collinearity << "\n";
      for (const auto& f : rep.failures) std::cout << "  FAIL " << f << "\n";
      const bool ok = rep.occupancy_ok() && rep.saddle_ok();
      std::cout << (ok ? "oracle-check: PASS\n" : "oracle-check: FAIL\n");
      return ok ? 0 : 1;
    }
  } catch (const ccil::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
