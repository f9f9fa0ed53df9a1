#pragma once

#include "ccil/gail/discriminator.hpp"
#include "ccil/rollout/batch.hpp"

namespace ccil::rollout {

/// Encoded (observation, action) rows of a batch for the discriminator.
nn::Matrix discriminator_inputs(const Batch& batch, const gail::Discriminator& disc);

/// Fill batch.surrogate_rewards with -log D(s_t, a_t) from one snapshot of
/// the discriminator and refresh the stats.
void label_surrogate_reward(Batch& batch, const gail::Discriminator& disc);

}  // namespace ccil::rollout
