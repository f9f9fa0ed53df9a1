#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ccil/nn/mlp.hpp"
#include "ccil/rollout/batch.hpp"

namespace ccil::rollout {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + values
};

/// Generalized advantage estimation over a flat series with episode ends
/// marked in `dones`. A series whose last step is not done bootstraps from
/// `bootstrap_value`.
GaeResult gae(std::span<const double> x, std::span<const double> values, std::span<const std::uint8_t> dones,
              double gamma, double lambda, double bootstrap_value = 0.0);

/// Shift and scale to zero mean and unit variance (population std + 1e-8).
std::vector<double> whiten(std::span<const double> v);

/// Both channels of a labelled batch.
struct AdvantageBuffer {
  std::vector<double> reward_advantages;  // whitened
  std::vector<double> cost_advantages;    // raw
  std::vector<double> reward_to_go;       // unwhitened advantage + value
  std::vector<double> cost_to_go;
  std::vector<double> reward_values;
  std::vector<double> cost_values;

  AdvantageBuffer select(std::span<const std::size_t> rows) const;
};

/// Value predictions for every row of the batch plus the bootstrap state.
std::vector<double> predict_values(const nn::MlpNet& value_net, const nn::Matrix& observations);

AdvantageBuffer compute_advantages(const Batch& batch, const nn::MlpNet& reward_value, const nn::MlpNet& cost_value,
                                   double gamma, double lambda);

}  // namespace ccil::rollout
