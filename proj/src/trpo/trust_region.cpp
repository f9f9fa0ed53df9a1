#include "ccil/trpo/trust_region.hpp"

#include <cmath>

#include "ccil/common/errors.hpp"
#include "ccil/nn/policy_head.hpp"
#include "ccil/simd/kernels.hpp"
#include "ccil/trpo/conjugate_gradient.hpp"

namespace ccil::trpo {

void TrustRegionConfig::validate() const {
  if (!(max_kl > 0.0)) throw ConfigError("max KL must be positive");
  if (cg_iterations == 0) throw ConfigError("CG needs at least one iteration");
  if (!(cg_residual_tol > 0.0)) throw ConfigError("CG tolerance must be positive");
  if (!(backtrack_ratio > 0.0 && backtrack_ratio < 1.0)) throw ConfigError("backtrack ratio must be in (0,1)");
  if (max_backtracks == 0) throw ConfigError("max backtracks must be positive");
  if (!(damping > 0.0)) throw ConfigError("damping must be positive");
  if (!(kl_slack >= 1.0)) throw ConfigError("KL slack must be at least 1");
}

StepResult trust_region_step(const nn::MlpNet& policy, const PolicyBatch& batch, const SurrogateSpec& spec,
                             const TrustRegionConfig& config) {
  config.validate();
  StepResult res{policy.params(), {}};
  StepReport& rep = res.report;
  if (batch.size() == 0) {
    rep.error = "empty batch";
    return res;
  }

  const nn::PolicyOutput old_out = nn::evaluate_policy(policy, batch.states);
  const std::vector<double> old_lp = nn::log_prob(old_out, batch.actions);
  const std::vector<double> adv = combined_advantage(batch, spec);
  rep.surrogate_before = surrogate_loss(old_out, old_lp, batch, adv, spec.entropy_coef);
  rep.surrogate_after = rep.surrogate_before;

  nn::ParamVector g = surrogate_gradient(policy, old_out, batch, adv, spec.entropy_coef);
  if (!g.all_finite()) {
    rep.error = "non-finite policy gradient";
    return res;
  }
  if (nn::norm(g) == 0.0) return res;

  auto fvp = [&](std::span<const double> v) {
    nn::ParamVector pv(g.manifest(), std::vector<double>(v.begin(), v.end()));
    nn::ParamVector out = nn::fisher_vector_product(policy, old_out, pv, config.damping);
    return std::vector<double>(out.values().begin(), out.values().end());
  };

  CgResult cg;
  try {
    cg = conjugate_gradient(fvp, g.values(), config.cg_iterations, config.cg_residual_tol);
  } catch (const Error& e) {
    rep.error = e.what();
    return res;
  }
  rep.cg_residual = cg.residual_norm;
  const std::vector<double> hx = fvp(cg.x);
  const double shs = simd::dot(cg.x, hx);
  if (!(shs > 0.0) || !std::isfinite(shs)) {
    rep.error = "degenerate natural-gradient curvature";
    return res;
  }
  const double step_scale = std::sqrt(2.0 * config.max_kl / shs);
  nn::ParamVector full(g.manifest(), cg.x);
  nn::scale(step_scale, full);
  rep.expected_improvement = nn::dot(g, full);

  nn::MlpNet candidate = policy;
  double frac = 1.0;
  for (std::size_t k = 0; k <= config.max_backtracks; ++k, frac *= config.backtrack_ratio) {
    nn::ParamVector theta = policy.params();
    nn::axpy(frac, full, theta);
    if (!theta.all_finite()) {
      rep.backtracks = k;
      continue;
    }
    candidate.set_params(std::move(theta));
    const nn::PolicyOutput out = nn::evaluate_policy(candidate, batch.states);
    double surr = 0.0;
    try {
      surr = surrogate_loss(out, old_lp, batch, adv, spec.entropy_coef);
    } catch (const NonFiniteError& e) {
      rep.error = e.what();
      rep.backtracks = k;
      return res;
    }
    const double kl = mean_kl(out, old_out);
    rep.backtracks = k;
    if (surr - rep.surrogate_before > 0.0 && kl <= config.kl_slack * config.max_kl) {
      rep.accepted = true;
      rep.kl = kl;
      rep.surrogate_after = surr;
      res.params = candidate.params();
      return res;
    }
  }
  return res;
}

}  // namespace ccil::trpo
