#pragma once

#include <array>
#include <vector>

#include "ccil/common/rng.hpp"
#include "ccil/env/cmdp.hpp"

namespace ccil::env {

enum class CostVariant { kHazard, kControlCost, kSpeedLimit };

const char* cost_variant_name(CostVariant v);
CostVariant parse_cost_variant(const std::string& s);

struct Circle {
  std::array<double, 2> center{0.0, 0.0};
  double radius = 0.0;
  friend bool operator==(const Circle&, const Circle&) = default;
};

/// Planar point mass in a disc arena. Observation (8 values): position,
/// velocity, goal - position, nearest hazard centre - position.
struct PointHazardSpec {
  double arena_radius = 2.0;
  std::array<double, 2> start{-1.5, 0.0};
  std::array<double, 2> goal{1.5, 0.0};
  double goal_radius = 0.3;
  std::vector<Circle> hazards{Circle{{0.0, 0.0}, 0.6}};
  CostVariant cost_variant = CostVariant::kHazard;
  /// Threshold for the control-cost (squared action norm) and speed-limit
  /// variants; unused by the hazard variant.
  double safety_coefficient = 0.4;
  int horizon = 200;
  double discount = 0.995;

  void validate() const;
  friend bool operator==(const PointHazardSpec&, const PointHazardSpec&) = default;
};

class PointHazardEnv final : public Environment {
 public:
  static constexpr double kDamping = 0.8;
  static constexpr double kAccel = 0.25;
  static constexpr double kDt = 0.1;
  static constexpr double kDistanceWeight = 0.05;
  static constexpr double kGoalBonus = 10.0;

  explicit PointHazardEnv(PointHazardSpec spec);

  const CmdpSpec& spec() const override { return cmdp_; }
  std::vector<double> reset(std::uint64_t seed) override;
  StepOutcome step(std::span<const double> action) override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<PointHazardEnv>(*this); }
  std::string describe() const override;

  const PointHazardSpec& point() const { return point_; }
  std::array<double, 2> position() const { return pos_; }
  std::array<double, 2> velocity() const { return vel_; }
  void set_state(std::array<double, 2> pos, std::array<double, 2> vel) {
    pos_ = pos;
    vel_ = vel;
  }
  bool in_hazard(std::array<double, 2> p) const;

 private:
  std::vector<double> observe() const;

  PointHazardSpec point_;
  CmdpSpec cmdp_;
  std::array<double, 2> pos_{};
  std::array<double, 2> vel_{};
  int t_ = 0;
  Rng rng_;
};

}  // namespace ccil::env
