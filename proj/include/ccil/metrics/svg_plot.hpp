#pragma once

#include <string>
#include <vector>

#include "ccil/learners/imitation_learner.hpp"

namespace ccil::metrics {

/// Three stacked line charts against iteration: true return, episode cost
/// with a horizontal rule at the expert cost, and cumulative cost rate.
std::string render_progress_svg(const std::vector<learners::IterationRecord>& records, double expert_cost,
                                const std::string& title);

}  // namespace ccil::metrics
