#include "ccil/env/point_hazard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ccil/common/errors.hpp"

namespace ccil::env {

namespace {

double norm2(std::array<double, 2> v) { return std::hypot(v[0], v[1]); }
std::array<double, 2> sub(std::array<double, 2> a, std::array<double, 2> b) { return {a[0] - b[0], a[1] - b[1]}; }

}  // namespace

const char* cost_variant_name(CostVariant v) {
  switch (v) {
    case CostVariant::kHazard: return "hazard";
    case CostVariant::kControlCost: return "control";
    case CostVariant::kSpeedLimit: return "speed";
  }
  return "?";
}

CostVariant parse_cost_variant(const std::string& s) {
  if (s == "hazard") return CostVariant::kHazard;
  if (s == "control" || s == "control-cost") return CostVariant::kControlCost;
  if (s == "speed" || s == "speed-limit") return CostVariant::kSpeedLimit;
  throw ConfigError("unknown cost variant '" + s + "' (expected hazard, control or speed)");
}

void PointHazardSpec::validate() const {
  if (!(arena_radius > 0.0)) throw ConfigError("arena radius must be positive");
  if (norm2(goal) + goal_radius > arena_radius) throw ConfigError("goal must lie inside the arena");
  if (norm2(start) > arena_radius) throw ConfigError("start must lie inside the arena");
  if (!(goal_radius > 0.0)) throw ConfigError("goal radius must be positive");
  for (const Circle& c : hazards) {
    if (!(c.radius > 0.0) || norm2(c.center) + c.radius > arena_radius) {
      throw ConfigError("hazards must be circles inside the arena");
    }
  }
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("discount must be in (0,1)");
  if (!std::isfinite(safety_coefficient)) throw ConfigError("safety coefficient must be finite");
}

PointHazardEnv::PointHazardEnv(PointHazardSpec spec) : point_(std::move(spec)) {
  point_.validate();
  cmdp_.name = "point";
  cmdp_.observation_dim = 8;
  cmdp_.action_space = ActionSpace::box(2, -1.0, 1.0);
  cmdp_.discount = point_.discount;
  cmdp_.horizon = point_.horizon;
  if (point_.cost_variant != CostVariant::kHazard) cmdp_.safety_coefficient = point_.safety_coefficient;
  pos_ = point_.start;
}

bool PointHazardEnv::in_hazard(std::array<double, 2> p) const {
  return std::any_of(point_.hazards.begin(), point_.hazards.end(),
                     [&](const Circle& c) { return norm2(sub(p, c.center)) < c.radius; });
}

std::vector<double> PointHazardEnv::observe() const {
  std::array<double, 2> to_hazard{0.0, 0.0};
  double best = std::numeric_limits<double>::infinity();
  for (const Circle& c : point_.hazards) {
    auto d = sub(c.center, pos_);
    if (norm2(d) < best) {
      best = norm2(d);
      to_hazard = d;
    }
  }
  auto to_goal = sub(point_.goal, pos_);
  return {pos_[0], pos_[1], vel_[0], vel_[1], to_goal[0], to_goal[1], to_hazard[0], to_hazard[1]};
}

std::vector<double> PointHazardEnv::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  // Small start jitter keeps seeds distinguishable.
  pos_ = {point_.start[0] + rng_.uniform(-0.05, 0.05), point_.start[1] + rng_.uniform(-0.05, 0.05)};
  vel_ = {0.0, 0.0};
  t_ = 0;
  return observe();
}

StepOutcome PointHazardEnv::step(std::span<const double> action) {
  if (action.size() != 2) throw ShapeError("point actions are 2-dimensional");
  StepOutcome out;
  std::array<double, 2> a{};
  for (int i = 0; i < 2; ++i) {
    if (!std::isfinite(action[i])) throw NonFiniteError("non-finite point action");
    a[i] = std::clamp(action[i], -1.0, 1.0);
    if (a[i] != action[i]) out.clipped = true;
  }
  for (int i = 0; i < 2; ++i) {
    vel_[i] = kDamping * vel_[i] + kAccel * a[i];
    pos_[i] += kDt * vel_[i];
  }
  const double r = norm2(pos_);
  if (r > point_.arena_radius) {
    pos_ = {pos_[0] * point_.arena_radius / r, pos_[1] * point_.arena_radius / r};
    vel_ = {0.0, 0.0};
  }
  ++t_;

  switch (point_.cost_variant) {
    case CostVariant::kHazard: out.cost = in_hazard(pos_) ? 1.0 : 0.0; break;
    case CostVariant::kControlCost:
      out.cost = indicator_cost(a[0] * a[0] + a[1] * a[1], point_.safety_coefficient);
      break;
    case CostVariant::kSpeedLimit: out.cost = indicator_cost(norm2(vel_), point_.safety_coefficient); break;
  }

  const double dist = norm2(sub(point_.goal, pos_));
  const bool at_goal = dist < point_.goal_radius;
  out.reward = PrivilegedReward(-kDistanceWeight * dist + (at_goal ? kGoalBonus : 0.0));
  out.done = at_goal || t_ >= point_.horizon;
  out.truncated = out.done && !at_goal;
  out.observation = observe();
  return out;
}

std::string PointHazardEnv::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "env.name = point\n";
  os << "env.point.arena_radius = " << point_.arena_radius << "\n";
  os << "env.point.start = " << point_.start[0] << "," << point_.start[1] << "\n";
  os << "env.point.goal = " << point_.goal[0] << "," << point_.goal[1] << "\n";
  os << "env.point.goal_radius = " << point_.goal_radius << "\n";
  os << "env.point.hazards = ";
  for (std::size_t i = 0; i < point_.hazards.size(); ++i) {
    const Circle& c = point_.hazards[i];
    os << (i ? ";" : "") << c.center[0] << "," << c.center[1] << "," << c.radius;
  }
  os << "\n";
  os << "env.cost_variant = " << cost_variant_name(point_.cost_variant) << "\n";
  os << "env.safety_coefficient = " << point_.safety_coefficient << "\n";
  os << "env.horizon = " << point_.horizon << "\n";
  return os.str();
}

}  // namespace ccil::env
