#pragma once

#include <span>
#include <vector>

#include "ccil/nn/matrix.hpp"
#include "ccil/nn/mlp.hpp"
#include "ccil/nn/policy_head.hpp"

namespace ccil::trpo {

enum class SurrogateMode {
  kPenalized,       // A_r - lambda * A_d
  kRewardOnly,      // A_r
  kCostMinimizing,  // -A_d: maximizing it minimizes the cost surrogate
};

const char* mode_name(SurrogateMode m);

struct SurrogateSpec {
  SurrogateMode mode = SurrogateMode::kPenalized;
  double lambda = 0.0;
  double entropy_coef = 0.0;

  void validate() const;
};

/// What a trust-region step needs from a batch.
struct PolicyBatch {
  nn::Matrix states;
  nn::Matrix actions;
  std::vector<double> reward_advantages;
  std::vector<double> cost_advantages;

  std::size_t size() const { return states.rows(); }
};

std::vector<double> combined_advantage(const PolicyBatch& batch, const SurrogateSpec& spec);

/// Log-prob gap beyond which a ratio is treated as non-finite.
inline constexpr double kMaxLogRatio = 30.0;

/// mean_i exp(logp_new - logp_old) * combined_i + entropy_coef * mean H(new).
/// Throws NonFiniteError when any |logp_new - logp_old| exceeds kMaxLogRatio.
double surrogate_loss(const nn::PolicyOutput& current, std::span<const double> old_log_probs,
                      const PolicyBatch& batch, std::span<const double> combined, double entropy_coef);
double surrogate_loss(const nn::MlpNet& policy_new, const nn::MlpNet& policy_old, const PolicyBatch& batch,
                      const SurrogateSpec& spec);

/// Gradient of surrogate_loss at policy_new == policy_old.
nn::ParamVector surrogate_gradient(const nn::MlpNet& policy, const nn::PolicyOutput& out, const PolicyBatch& batch,
                                   std::span<const double> combined, double entropy_coef);

/// Mean over states of KL(new || old).
double mean_kl(const nn::MlpNet& policy_new, const nn::MlpNet& policy_old, const nn::Matrix& states);
double mean_kl(const nn::PolicyOutput& current, const nn::PolicyOutput& old);

}  // namespace ccil::trpo
