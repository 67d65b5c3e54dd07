#include "grail/environment.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <utility>

#include "grail/errors.hpp"

namespace grail {

void WorldConfig::validate(int n) const {
  if (grid_w < 1) throw ValidationError("world.grid_w", "must be >= 1");
  if (grid_h < 1) throw ValidationError("world.grid_h", "must be >= 1");
  if (trial_timeout < 1) {
    throw ValidationError("world.trial_timeout", "must be >= 1");
  }
  if (trials_per_epoch < 1) {
    throw ValidationError("world.trials_per_epoch", "must be >= 1");
  }
  if (static_cast<int>(button_cells.size()) != n) {
    throw ValidationError("world.button_cells",
                          "expected " + std::to_string(n) + " cells, got " +
                              std::to_string(button_cells.size()));
  }
  auto in_bounds = [&](Cell c) {
    return c.x >= 0 && c.x < grid_w && c.y >= 0 && c.y < grid_h;
  };
  std::set<std::pair<int, int>> seen;
  for (Cell c : button_cells) {
    if (!in_bounds(c)) {
      throw ValidationError("world.button_cells", "cell out of bounds");
    }
    if (!seen.emplace(c.x, c.y).second) {
      throw ValidationError("world.button_cells", "cells must be distinct");
    }
  }
  if (!in_bounds(home_cell)) {
    throw ValidationError("world.home_cell", "cell out of bounds");
  }
}

ButtonWorld::ButtonWorld(WorldConfig config, GraphSchedule schedule)
    : config_(std::move(config)),
      schedule_(std::move(schedule)) {
  config_.validate(schedule_.n());
  reset_epoch(0);
}

Observation ButtonWorld::observe() const {
  Observation obs;
  obs.distances.reserve(config_.button_cells.size());
  for (Cell b : config_.button_cells) {
    int dx = std::abs(b.x - state_.effector.x);
    int dy = std::abs(b.y - state_.effector.y);
    obs.distances.push_back(static_cast<double>(std::max(dx, dy)));
  }
  obs.states = state_.ctx;
  return obs;
}

Observation ButtonWorld::reset_epoch(int epoch_index) {
  schedule_.graph_at(epoch_index);  // validates the index
  state_ = WorldState{config_.home_cell, Context{}, epoch_index, 0, 0};
  lit_order_.clear();
  return observe();
}

void ButtonWorld::check_goal(GoalId g) const {
  if (g < 0 || g >= n()) throw InvalidGoal(g, n());
}

StepResult ButtonWorld::apply(Action action, std::optional<GoalId> direct) {
  if (state_.step_in_trial >= config_.trial_timeout) throw TrialExhausted();
  ++state_.step_in_trial;

  StepResult result;
  Cell& e = state_.effector;
  switch (action) {
    case Action::kMoveUp:
      e.y = std::min(e.y + 1, config_.grid_h - 1);
      break;
    case Action::kMoveDown:
      e.y = std::max(e.y - 1, 0);
      break;
    case Action::kMoveLeft:
      e.x = std::max(e.x - 1, 0);
      break;
    case Action::kMoveRight:
      e.x = std::min(e.x + 1, config_.grid_w - 1);
      break;
    case Action::kPress: {
      std::optional<GoalId> hit = direct;
      if (!hit) {
        auto it = std::find(config_.button_cells.begin(),
                            config_.button_cells.end(), e);
        if (it != config_.button_cells.end()) {
          hit = static_cast<GoalId>(it - config_.button_cells.begin());
        }
      }
      if (hit) {
        result.pressed = *hit;
        if (!state_.ctx.test(*hit) &&
            preconditions_satisfied(graph(), *hit, state_.ctx)) {
          state_.ctx.set(*hit);
          lit_order_.push_back(*hit);
          result.newly_lit = *hit;
        }
      }
      break;
    }
  }
  result.observation = observe();
  return result;
}

StepResult ButtonWorld::step(Action action) {
  return apply(action, std::nullopt);
}

StepResult ButtonWorld::press(GoalId g) {
  check_goal(g);
  if (state_.step_in_trial >= config_.trial_timeout) throw TrialExhausted();
  state_.effector = config_.button_cells[g];
  return apply(Action::kPress, g);
}

void ButtonWorld::begin_trial(GoalId target) {
  check_goal(target);
  if (state_.trial >= config_.trials_per_epoch) throw EpochExhausted();
  target_ = target;
  state_.step_in_trial = 0;
  trial_ctx_before_ = state_.ctx;
  trial_lit_start_ = lit_order_.size();
}

bool ButtonWorld::trial_finished() const {
  return state_.ctx.test(target_) ||
         state_.step_in_trial >= config_.trial_timeout;
}

void ButtonWorld::exhaust_trial() {
  state_.step_in_trial = config_.trial_timeout;
}

TrialOutcome ButtonWorld::end_trial() {
  TrialOutcome out;
  out.target = target_;
  out.achieved = state_.ctx.test(target_);
  out.steps_used = state_.step_in_trial;
  out.lit_during_trial.assign(
      lit_order_.begin() + static_cast<std::ptrdiff_t>(trial_lit_start_),
      lit_order_.end());
  out.ctx_before = trial_ctx_before_;
  out.ctx_after = state_.ctx;
  ++state_.trial;
  state_.step_in_trial = 0;
  return out;
}

TrialOutcome ButtonWorld::run_trial(const StepPolicy& policy, GoalId target,
                                    const StepObserver& on_step) {
  begin_trial(target);
  Observation obs = observe();
  while (!trial_finished()) {
    Action a = policy(obs, state_);
    StepResult r = step(a);
    if (on_step) on_step(a, r);
    obs = std::move(r.observation);
  }
  return end_trial();
}

}  // namespace grail
