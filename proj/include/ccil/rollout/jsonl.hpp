#pragma once

#include <iosfwd>

#include "ccil/rollout/batch.hpp"

namespace ccil::rollout {

/// One JSON object per step: t, obs, act, logp, r_true, r_surr, cost, done.
/// r_surr is null when the batch is unlabelled.
void write_jsonl(std::ostream& os, const Batch& batch);

}  // namespace ccil::rollout
