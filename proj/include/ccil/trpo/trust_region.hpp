#pragma once

#include <string>

#include "ccil/nn/mlp.hpp"
#include "ccil/trpo/surrogate.hpp"

namespace ccil::trpo {

struct TrustRegionConfig {
  double max_kl = 0.01;
  std::size_t cg_iterations = 10;
  double cg_residual_tol = 1e-10;
  double backtrack_ratio = 0.8;
  std::size_t max_backtracks = 10;
  double damping = 0.1;
  /// Accepted candidates must satisfy mean KL <= kl_slack * max_kl.
  double kl_slack = 1.5;

  void validate() const;
  friend bool operator==(const TrustRegionConfig&, const TrustRegionConfig&) = default;
};

struct StepReport {
  bool accepted = false;
  double kl = 0.0;
  double surrogate_before = 0.0;
  double surrogate_after = 0.0;
  std::size_t backtracks = 0;
  double cg_residual = 0.0;
  /// Predicted first-order improvement of the full step.
  double expected_improvement = 0.0;
  /// Set when the step was abandoned (non-finite gradient, CG failure, ratio blow-up).
  std::string error;
};

struct StepResult {
  nn::ParamVector params;
  StepReport report;
};

/// One natural-gradient step with backtracking line search. The returned
/// params equal the input params unless the report says accepted.
StepResult trust_region_step(const nn::MlpNet& policy, const PolicyBatch& batch, const SurrogateSpec& spec,
                             const TrustRegionConfig& config);

}  // namespace ccil::trpo
