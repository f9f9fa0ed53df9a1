#pragma once

#include "ccil/env/cmdp.hpp"

namespace ccil::rollout {

struct PrivilegedView {
  static env::RewardAccess token() { return {}; }
};

}  // namespace ccil::rollout
