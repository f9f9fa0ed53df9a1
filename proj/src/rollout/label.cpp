#include "ccil/rollout/label.hpp"

namespace ccil::rollout {

nn::Matrix discriminator_inputs(const Batch& batch, const gail::Discriminator& disc) {
  return disc.encode(batch.observations, batch.actions);
}

void label_surrogate_reward(Batch& batch, const gail::Discriminator& disc) {
  batch.surrogate_rewards = disc.surrogate_rewards(discriminator_inputs(batch, disc));
  const std::size_t clipped = batch.stats.clipped_actions;
  batch.stats = summarize(batch);
  batch.stats.clipped_actions = clipped;
}

}  // namespace ccil::rollout
