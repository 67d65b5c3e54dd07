#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "grail/core.hpp"

namespace grail {

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(Cell, Cell) = default;
};

struct WorldConfig {
  int grid_w = 10;
  int grid_h = 10;
  std::vector<Cell> button_cells;
  Cell home_cell{0, 0};
  int trial_timeout = 70;
  int trials_per_epoch = 8;

  // Throws ValidationError naming the offending field.
  void validate(int n) const;
};

enum class Action { kMoveUp, kMoveDown, kMoveLeft, kMoveRight, kPress };
inline constexpr int kNumActions = 5;

struct WorldState {
  Cell effector;
  Context ctx;
  int epoch = 0;
  int trial = 0;  // trials completed in this epoch
  int step_in_trial = 0;
};

struct StepResult {
  Observation observation;
  std::optional<GoalId> pressed;
  std::optional<GoalId> newly_lit;
};

struct TrialOutcome {
  GoalId target = 0;
  bool achieved = false;
  int steps_used = 0;
  std::vector<GoalId> lit_during_trial;  // in lighting order
  Context ctx_before;
  Context ctx_after;
};

// Chooses the next action given the current observation and state.
using StepPolicy = std::function<Action(const Observation&, const WorldState&)>;
using StepObserver = std::function<void(Action, const StepResult&)>;

// Discrete reaching world: a grid with one button per goal. A press on a
// button lights it iff all of its preconditions are lit. Buttons stay lit
// until the next epoch reset.
class ButtonWorld {
 public:
  ButtonWorld(WorldConfig config, GraphSchedule schedule);

  int n() const { return schedule_.n(); }
  const WorldConfig& config() const { return config_; }
  const WorldState& state() const { return state_; }
  const DependencyGraph& graph() const { return schedule_.graph_at(state_.epoch); }
  const GraphSchedule& schedule() const { return schedule_; }
  Observation observe() const;
  // Goals lit so far this epoch, in lighting order.
  const std::vector<GoalId>& lit_order() const { return lit_order_; }

  // Effector home, all buttons off, trial counter cleared, graph switched to
  // the schedule's graph for `epoch_index`.
  Observation reset_epoch(int epoch_index);

  // Applies one action. Throws TrialExhausted once the trial's step budget
  // is spent.
  StepResult step(Action action);
  // Geometry-free press of button g (the effector jumps to its cell). Costs
  // one step.
  StepResult press(GoalId g);

  // Trial bookkeeping used by run_trial and by skills that drive the world
  // directly. begin_trial throws EpochExhausted if the epoch is used up.
  void begin_trial(GoalId target);
  bool trial_finished() const;
  // Spends the remaining step budget without acting (a failed reach).
  void exhaust_trial();
  TrialOutcome end_trial();

  TrialOutcome run_trial(const StepPolicy& policy, GoalId target,
                         const StepObserver& on_step = {});

 private:
  StepResult apply(Action action, std::optional<GoalId> direct);
  void check_goal(GoalId g) const;

  WorldConfig config_;
  GraphSchedule schedule_;
  WorldState state_;
  std::vector<GoalId> lit_order_;

  // Per-trial scratch.
  GoalId target_ = 0;
  Context trial_ctx_before_;
  std::size_t trial_lit_start_ = 0;
};

}  // namespace grail
