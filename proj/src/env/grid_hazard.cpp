#include "ccil/env/grid_hazard.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ccil/common/errors.hpp"

namespace ccil::env {

namespace {

bool inside(const GridHazardSpec& g, Cell c) { return c.x >= 0 && c.y >= 0 && c.x < g.width && c.y < g.height; }

}  // namespace

void TabularMdp::validate() const {
  const std::size_t S = num_states;
  const std::size_t A = num_actions;
  if (S == 0 || A == 0) throw ConfigError("tabular MDP must have states and actions");
  if (transition.size() != S * A * S || initial.size() != S || cost.size() != S * A || reward.size() != S * A) {
    throw ConfigError("tabular MDP arrays have inconsistent sizes");
  }
  auto check_row = [](const double* row, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(row[i] >= 0.0)) throw ConfigError("negative or NaN probability");
      s += row[i];
    }
    if (std::abs(s - 1.0) > 1e-9) throw ConfigError("probability row does not sum to 1");
  };
  check_row(initial.data(), S);
  for (std::size_t k = 0; k < S * A; ++k) check_row(transition.data() + k * S, S);
}

void GridHazardSpec::validate() const {
  if (width <= 0 || height <= 0) throw ConfigError("grid dimensions must be positive");
  if (!inside(*this, start) || !inside(*this, goal)) throw ConfigError("start and goal must lie on the grid");
  if (start == goal) throw ConfigError("start and goal must differ");
  for (const Cell& h : hazards) {
    if (!inside(*this, h)) throw ConfigError("hazard outside the grid");
    if (h == start) throw ConfigError("the start cell cannot be a hazard");
  }
  if (!(slip_probability >= 0.0 && slip_probability < 1.0)) throw ConfigError("slip probability must be in [0,1)");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("discount must be in (0,1)");
}

GridHazardSpec default_grid_spec() {
  GridHazardSpec g;
  g.width = 5;
  g.height = 5;
  g.start = {0, 0};
  g.goal = {4, 0};
  g.hazards = {{1, 0}, {2, 0}, {3, 0}, {2, 1}, {3, 1}, {2, 2}, {3, 2}, {2, 3}};
  return g;
}

GridHazardEnv::GridHazardEnv(GridHazardSpec spec) : grid_(std::move(spec)) {
  grid_.validate();
  cmdp_.name = "grid";
  cmdp_.observation_dim = static_cast<std::size_t>(grid_.width * grid_.height);
  cmdp_.action_space = ActionSpace::discrete(4);
  cmdp_.discount = grid_.discount;
  cmdp_.horizon = grid_.horizon;
  pos_ = grid_.start;
}

bool GridHazardEnv::is_hazard(Cell c) const {
  return std::find(grid_.hazards.begin(), grid_.hazards.end(), c) != grid_.hazards.end();
}

std::vector<double> GridHazardEnv::one_hot(Cell c) const {
  std::vector<double> o(cmdp_.observation_dim, 0.0);
  o[static_cast<std::size_t>(state_index(c))] = 1.0;
  return o;
}

Cell GridHazardEnv::move(Cell c, int action) const {
  static constexpr int dx[4] = {0, 1, 0, -1};
  static constexpr int dy[4] = {1, 0, -1, 0};
  Cell next{c.x + dx[action], c.y + dy[action]};
  return inside(grid_, next) ? next : c;
}

std::vector<double> GridHazardEnv::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  pos_ = grid_.start;
  t_ = 0;
  return one_hot(pos_);
}

StepOutcome GridHazardEnv::step(std::span<const double> action) {
  if (action.size() != 1) throw ShapeError("grid actions are a single index");
  const double a = action[0];
  if (!(a >= 0.0 && a < 4.0) || a != std::floor(a)) throw ShapeError("grid action must be 0..3");
  int executed = static_cast<int>(a);
  if (grid_.slip_probability > 0.0 && rng_.uniform() < grid_.slip_probability) {
    executed = static_cast<int>(rng_.below(4));
  }
  pos_ = move(pos_, executed);
  ++t_;
  StepOutcome out;
  out.cost = is_hazard(pos_) ? 1.0 : 0.0;
  const bool at_goal = pos_ == grid_.goal;
  out.reward = PrivilegedReward(at_goal ? 1.0 : 0.0);
  out.done = at_goal || t_ >= grid_.horizon;
  out.truncated = out.done && !at_goal;
  out.observation = one_hot(pos_);
  return out;
}

TabularMdp GridHazardEnv::tabular() const {
  TabularMdp m;
  const std::size_t S = cmdp_.observation_dim;
  const std::size_t A = 4;
  m.num_states = S;
  m.num_actions = A;
  m.transition.assign(S * A * S, 0.0);
  m.initial.assign(S, 0.0);
  m.cost.assign(S * A, 0.0);
  m.reward.assign(S * A, 0.0);
  m.initial[static_cast<std::size_t>(state_index(grid_.start))] = 1.0;
  const std::size_t goal = static_cast<std::size_t>(state_index(grid_.goal));
  for (std::size_t s = 0; s < S; ++s) {
    const Cell c = cell_of(static_cast<int>(s));
    for (std::size_t a = 0; a < A; ++a) {
      double* row = m.transition.data() + (s * A + a) * S;
      if (s == goal) {
        row[goal] = 1.0;
        continue;
      }
      for (int e = 0; e < 4; ++e) {
        double pe = (e == static_cast<int>(a) ? 1.0 - grid_.slip_probability : 0.0) + grid_.slip_probability / 4.0;
        const Cell n = move(c, e);
        const std::size_t s2 = static_cast<std::size_t>(state_index(n));
        row[s2] += pe;
        m.cost[s * A + a] += pe * (is_hazard(n) ? 1.0 : 0.0);
        m.reward[s * A + a] += pe * (n == grid_.goal ? 1.0 : 0.0);
      }
    }
  }
  return m;
}

std::string GridHazardEnv::describe() const {
  std::ostringstream os;
  os << "env.name = grid\n";
  os << "env.grid.width = " << grid_.width << "\n";
  os << "env.grid.height = " << grid_.height << "\n";
  os << "env.grid.start = " << grid_.start.x << "," << grid_.start.y << "\n";
  os << "env.grid.goal = " << grid_.goal.x << "," << grid_.goal.y << "\n";
  os << "env.grid.hazards = ";
  for (std::size_t i = 0; i < grid_.hazards.size(); ++i) {
    os << (i ? ";" : "") << grid_.hazards[i].x << "," << grid_.hazards[i].y;
  }
  os << "\n";
  os << "env.grid.slip_probability = " << grid_.slip_probability << "\n";
  os << "env.horizon = " << grid_.horizon << "\n";
  return os.str();
}

}  // namespace ccil::env
