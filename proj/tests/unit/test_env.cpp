#include <doctest.h>

#include <cmath>

#include "ccil/common/errors.hpp"
#include "ccil/env/grid_hazard.hpp"
#include "ccil/env/point_hazard.hpp"
#include "support.hpp"

using namespace ccil;
using env::Cell;

namespace {

env::GridHazardSpec no_slip() {
  env::GridHazardSpec g = env::default_grid_spec();
  g.slip_probability = 0.0;
  return g;
}

env::StepOutcome act(env::Environment& e, std::vector<double> a) { return e.step(a); }

}  // namespace

TEST_CASE("indicator cost is strict") {
  CHECK(env::indicator_cost(0.5, 0.4) == 1.0);
  CHECK(env::indicator_cost(0.4, 0.4) == 0.0);
  CHECK(env::indicator_cost(0.0, 0.4) == 0.0);
}

TEST_CASE("grid observations are one-hot and resets are deterministic") {
  env::GridHazardEnv e(env::default_grid_spec());
  auto o1 = e.reset(42);
  CHECK(o1.size() == 25);
  double sum = 0.0;
  for (double v : o1) sum += v;
  CHECK(sum == 1.0);
  CHECK(o1[0] == 1.0);

  env::GridHazardEnv a(env::default_grid_spec()), b(env::default_grid_spec());
  a.reset(7);
  b.reset(7);
  for (int t = 0; t < 50; ++t) {
    auto sa = act(a, {double(t % 4)});
    auto sb = act(b, {double(t % 4)});
    CHECK(sa.observation == sb.observation);
    CHECK(sa.cost == sb.cost);
    if (sa.done) break;
  }
}

TEST_CASE("grid hazard and goal transitions") {
  env::GridHazardEnv e(no_slip());
  e.reset(0);
  e.set_position({0, 0});
  auto s = act(e, {1.0});  // right onto (1,0), a hazard
  CHECK(e.position() == Cell{1, 0});
  CHECK(s.cost == 1.0);
  CHECK(testing::read_reward(s.reward) == 0.0);
  CHECK_FALSE(s.done);

  e.set_position({4, 1});
  s = act(e, {2.0});  // down onto the goal
  CHECK(s.done);
  CHECK_FALSE(s.truncated);
  CHECK(testing::read_reward(s.reward) == 1.0);
  CHECK(s.cost == 0.0);

  e.reset(0);
  e.set_position({0, 0});
  s = act(e, {3.0});  // wall: stay
  CHECK(e.position() == Cell{0, 0});
}

TEST_CASE("grid horizon truncates") {
  env::GridHazardSpec g = no_slip();
  g.horizon = 3;
  env::GridHazardEnv e(g);
  e.reset(0);
  act(e, {3.0});
  act(e, {3.0});
  auto s = act(e, {3.0});
  CHECK(s.done);
  CHECK(s.truncated);
}

TEST_CASE("grid rejects invalid layouts and actions") {
  env::GridHazardSpec g = env::default_grid_spec();
  g.hazards.push_back(g.start);
  CHECK_THROWS_AS(env::GridHazardEnv{g}, ConfigError);
  g = env::default_grid_spec();
  g.goal = g.start;
  CHECK_THROWS_AS(env::GridHazardEnv{g}, ConfigError);
  env::GridHazardEnv e(env::default_grid_spec());
  e.reset(0);
  CHECK_THROWS_AS(act(e, {4.0}), ShapeError);
  CHECK_THROWS_AS(act(e, {0.5}), ShapeError);
}

TEST_CASE("tabular grid model matches sampled transitions") {
  env::GridHazardEnv e(env::default_grid_spec());
  const auto m = e.tabular();
  m.validate();
  const Cell from{2, 4};  // top edge next to the hazard at (2,3)
  const std::size_t s = std::size_t(e.state_index(from));
  for (int a = 0; a < 4; ++a) {
    std::vector<double> count(25, 0.0);
    double cost = 0.0;
    const int n = 40000;
    e.reset(100 + a);
    for (int k = 0; k < n; ++k) {
      e.set_position(from);
      auto out = act(e, {double(a)});
      count[std::size_t(e.state_index(e.position()))] += 1.0;
      cost += out.cost;
    }
    for (std::size_t s2 = 0; s2 < 25; ++s2) {
      const double p = m.p(s, std::size_t(a), s2);
      const double se = std::sqrt(p * (1 - p) / n) + 1e-12;
      CHECK(std::abs(count[s2] / n - p) <= 5 * se);
    }
    const double pc = m.cost[m.sa(s, std::size_t(a))];
    CHECK(std::abs(cost / n - pc) <= 5 * std::sqrt(pc * (1 - pc) / n) + 1e-12);
  }
  const std::size_t goal = std::size_t(e.state_index(e.grid().goal));
  for (std::size_t a = 0; a < 4; ++a) CHECK(m.p(goal, a, goal) == 1.0);
}

TEST_CASE("point observation layout and cost variants") {
  env::PointHazardSpec p;
  env::PointHazardEnv e(p);
  auto o = e.reset(3);
  REQUIRE(o.size() == 8);
  CHECK(std::abs(o[0] - p.start[0]) <= 0.05);
  CHECK(o[2] == 0.0);
  CHECK(o[4] == doctest::Approx(p.goal[0] - o[0]));
  CHECK(o[6] == doctest::Approx(0.0 - o[0]));

  p.cost_variant = env::CostVariant::kControlCost;
  env::PointHazardEnv c(p);
  c.reset(0);
  CHECK(act(c, {0.5, 0.5}).cost == 1.0);  // squared norm 0.5
  CHECK(act(c, {std::sqrt(0.3), 0.0}).cost == 0.0);

  auto clipped = act(c, {3.0, 0.0});
  CHECK(clipped.clipped);
  CHECK(clipped.cost == 1.0);

  p.cost_variant = env::CostVariant::kHazard;
  env::PointHazardEnv h(p);
  h.reset(0);
  h.set_state({0.1, 0.0}, {0.0, 0.0});
  CHECK(act(h, {0.0, 0.0}).cost == 1.0);
  h.set_state({p.goal[0] - 0.05, 0.0}, {0.0, 0.0});
  auto g = act(h, {0.0, 0.0});
  CHECK(g.done);
  CHECK_FALSE(g.truncated);
  CHECK(testing::read_reward(g.reward) > 9.0);
}

TEST_CASE("point speed-limit cost and arena projection") {
  env::PointHazardSpec p;
  p.cost_variant = env::CostVariant::kSpeedLimit;
  p.safety_coefficient = 0.3;
  env::PointHazardEnv e(p);
  e.reset(0);
  e.set_state({-1.0, 0.0}, {0.5, 0.0});
  CHECK(act(e, {0.0, 0.0}).cost == 1.0);  // speed 0.4
  e.set_state({-1.0, 0.0}, {0.3, 0.0});
  CHECK(act(e, {0.0, 0.0}).cost == 0.0);  // speed 0.24
  e.set_state({0.0, 1.99}, {0.0, 1.0});
  act(e, {0.0, 1.0});
  const auto pos = e.position();
  CHECK(std::hypot(pos[0], pos[1]) <= p.arena_radius + 1e-12);
}

TEST_CASE("episode cost is an integer no larger than the horizon") {
  env::GridHazardEnv e(env::default_grid_spec());
  e.reset(9);
  double total = 0.0;
  int steps = 0;
  Rng rng(1);
  for (;;) {
    auto s = act(e, {double(rng.below(4))});
    total += s.cost;
    ++steps;
    if (s.done) break;
  }
  CHECK(total == std::floor(total));
  CHECK(total <= steps);
  CHECK(steps <= 50);
}
