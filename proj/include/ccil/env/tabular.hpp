#pragma once

#include <cstddef>
#include <vector>

namespace ccil::env {

/// Finite CMDP in explicit form. transition[(s * A + a) * S + s2] = P(s2 | s, a).
struct TabularMdp {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::vector<double> transition;
  std::vector<double> initial;  // p0(s)
  std::vector<double> cost;     // d(s, a), indexed s * A + a
  std::vector<double> reward;   // r(s, a), indexed s * A + a

  double p(std::size_t s, std::size_t a, std::size_t s2) const {
    return transition[(s * num_actions + a) * num_states + s2];
  }
  std::size_t sa(std::size_t s, std::size_t a) const { return s * num_actions + a; }

  /// Throws ConfigError unless every row is a probability distribution.
  void validate() const;
};

}  // namespace ccil::env
