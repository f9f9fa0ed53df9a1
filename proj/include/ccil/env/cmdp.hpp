#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ccil::rollout {
struct PrivilegedView;
}
namespace ccil::oracle {
struct PrivilegedView;
}
namespace ccil::testing {
struct PrivilegedView;
}

namespace ccil::env {

enum class ActionKind { kDiscrete, kBox };

struct ActionSpace {
  ActionKind kind = ActionKind::kDiscrete;
  std::size_t n = 0;    // discrete: number of actions
  std::size_t dim = 0;  // box: dimensionality
  double low = -1.0;
  double high = 1.0;

  static ActionSpace discrete(std::size_t n) { return {ActionKind::kDiscrete, n, 0, 0.0, 0.0}; }
  static ActionSpace box(std::size_t dim, double low, double high) { return {ActionKind::kBox, 0, dim, low, high}; }

  /// Width of the action encoding fed to the discriminator (one-hot or raw).
  std::size_t encoded_width() const { return kind == ActionKind::kDiscrete ? n : dim; }
  /// Width of a stored action row (index or vector).
  std::size_t stored_width() const { return kind == ActionKind::kDiscrete ? 1 : dim; }
};

struct CmdpSpec {
  std::string name;
  std::size_t observation_dim = 0;
  ActionSpace action_space;
  double discount = 0.995;
  int horizon = 1;
  std::optional<double> safety_coefficient;
};

/// Token required to read a true reward. Only the reporting layer of
/// rollout, the expert forge, and test code can construct one.
class RewardAccess {
  RewardAccess() = default;
  friend struct ccil::rollout::PrivilegedView;
  friend struct ccil::oracle::PrivilegedView;
  friend struct ccil::testing::PrivilegedView;
};

/// The environment's true reward. Learners never see its value.
class PrivilegedReward {
 public:
  PrivilegedReward() = default;
  explicit PrivilegedReward(double v) : value_(v) {}
  double read(const RewardAccess&) const { return value_; }

 private:
  double value_ = 0.0;
};

struct StepOutcome {
  std::vector<double> observation;
  PrivilegedReward reward;
  double cost = 0.0;
  bool done = false;
  /// Done only because the horizon ran out.
  bool truncated = false;
  /// A continuous action was outside the box and got clipped.
  bool clipped = false;
};

/// 1 iff the indicator strictly exceeds the safety coefficient.
double indicator_cost(double indicator_value, double safety_coefficient);

class Environment {
 public:
  virtual ~Environment() = default;
  virtual const CmdpSpec& spec() const = 0;
  /// Deterministic in `seed`; returns the initial observation.
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual StepOutcome step(std::span<const double> action) = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
  /// Canonical `key = value` text block for run manifests.
  virtual std::string describe() const = 0;
};

}  // namespace ccil::env
