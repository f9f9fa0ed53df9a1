#include "ccil/env/cmdp.hpp"

namespace ccil::env {

double indicator_cost(double indicator_value, double safety_coefficient) {
  return indicator_value > safety_coefficient ? 1.0 : 0.0;
}

}  // namespace ccil::env
