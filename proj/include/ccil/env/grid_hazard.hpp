#pragma once

#include <vector>

#include "ccil/common/rng.hpp"
#include "ccil/env/cmdp.hpp"
#include "ccil/env/tabular.hpp"

namespace ccil::env {

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Grid world with hazard cells. Actions: 0 up (+y), 1 right (+x), 2 down, 3 left.
/// With probability `slip_probability` the executed action is drawn uniformly
/// instead. Entering (or staying on) a hazard cell costs 1; entering the goal
/// pays reward 1 and ends the episode.
struct GridHazardSpec {
  int width = 5;
  int height = 5;
  Cell start{0, 0};
  Cell goal{4, 0};
  std::vector<Cell> hazards;
  double slip_probability = 0.1;
  int horizon = 50;
  double discount = 0.995;

  /// Throws ConfigError on an invalid layout.
  void validate() const;
  friend bool operator==(const GridHazardSpec&, const GridHazardSpec&) = default;
};

/// The shipped layout: a 5x5 grid whose shortest route crosses a hazard band.
GridHazardSpec default_grid_spec();

class GridHazardEnv final : public Environment {
 public:
  explicit GridHazardEnv(GridHazardSpec spec);

  const CmdpSpec& spec() const override { return cmdp_; }
  std::vector<double> reset(std::uint64_t seed) override;
  StepOutcome step(std::span<const double> action) override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<GridHazardEnv>(*this); }
  std::string describe() const override;

  const GridHazardSpec& grid() const { return grid_; }
  Cell position() const { return pos_; }
  /// Place the agent directly (tests and tabular evaluation).
  void set_position(Cell c) { pos_ = c; }

  int state_index(Cell c) const { return c.y * grid_.width + c.x; }
  Cell cell_of(int index) const { return {index % grid_.width, index / grid_.width}; }
  bool is_hazard(Cell c) const;
  std::vector<double> one_hot(Cell c) const;

  /// Explicit model with the goal as a zero-cost absorbing state.
  TabularMdp tabular() const;

 private:
  Cell move(Cell c, int action) const;

  GridHazardSpec grid_;
  CmdpSpec cmdp_;
  Cell pos_{};
  int t_ = 0;
  Rng rng_;
};

}  // namespace ccil::env
