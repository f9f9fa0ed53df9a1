#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ccil/learners/imitation_learner.hpp"
#include "ccil/metrics/config.hpp"
#include "ccil/metrics/metrics.hpp"
#include "ccil/oracle/expert.hpp"

namespace ccil::metrics {

using Logger = std::function<void(const std::string&)>;

/// Where a config expects its expert dataset.
std::filesystem::path expert_path_for(const RunConfig& config);

/// Forge an expert for the config's environment and budget.
oracle::ExpertDataset forge_expert(const RunConfig& config, const Logger& log = {});

/// Load the config's expert dataset. When it is missing, forge and save it if
/// `forge_if_missing`, otherwise throw ConfigError naming the forge command.
oracle::ExpertDataset obtain_expert(const RunConfig& config, bool forge_if_missing, const Logger& log = {});

struct RunResult {
  std::filesystem::path dir;
  std::vector<learners::IterationRecord> records;
  MetricRow metrics;
  bool failed = false;
  bool early_stopped = false;
  std::string error;
};

/// One (algorithm, seed) run into <out>/<algo>/<env>/<seed>/: progress.csv,
/// checkpoints, metrics.json, manifest.json, and a FAILED marker on error.
RunResult run_single(const RunConfig& config, learners::Algorithm algorithm, std::uint64_t seed,
                     const oracle::ExpertDataset& expert, const std::filesystem::path& out_root,
                     const Logger& log = {});

struct SummaryRow {
  std::string algorithm;
  std::string env;
  std::size_t seeds = 0;
  MeanStd r_pen;
  MeanStd r_rec;
  MeanStd cost_vio;
};

/// Re-read every <out>/<algo>/<env>/<seed>/metrics.json (skipping failed runs).
std::vector<SummaryRow> aggregate(const std::filesystem::path& out_root);
std::string format_summary(const std::vector<SummaryRow>& rows);
/// Writes summary.md and summary.csv under out_root.
void write_summary(const std::filesystem::path& out_root, const std::vector<SummaryRow>& rows);

struct ExperimentResult {
  std::vector<RunResult> runs;
  std::vector<SummaryRow> summary;
};

ExperimentResult run_experiment(const RunConfig& config, const std::vector<learners::Algorithm>& algorithms,
                                bool forge_if_missing, const Logger& log = {});

/// progress.csv header and row formatting.
std::string progress_header();
std::string progress_row(const learners::IterationRecord& r, double r_e, double j_e, double kappa);

}  // namespace ccil::metrics
