#include "ccil/rollout/jsonl.hpp"

#include <nlohmann/json.hpp>
#include <ostream>

#include "privileged.hpp"

namespace ccil::rollout {

void write_jsonl(std::ostream& os, const Batch& batch) {
  const auto token = PrivilegedView::token();
  for (std::size_t t = 0; t < batch.size(); ++t) {
    auto obs = batch.observations.row(t);
    auto act = batch.actions.row(t);
    nlohmann::json j;
    j["t"] = t;
    j["obs"] = std::vector<double>(obs.begin(), obs.end());
    j["act"] = std::vector<double>(act.begin(), act.end());
    j["logp"] = batch.log_probs[t];
    j["r_true"] = batch.true_rewards[t].read(token);
    j["r_surr"] = batch.labelled() ? nlohmann::json(batch.surrogate_rewards[t]) : nlohmann::json(nullptr);
    j["cost"] = batch.costs[t];
    j["done"] = batch.dones[t] != 0;
    j["truncated"] = batch.truncated[t] != 0;
    os << j.dump() << '\n';
  }
}

}  // namespace ccil::rollout
