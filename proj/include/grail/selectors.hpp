#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "grail/competence.hpp"
#include "grail/core.hpp"
#include "grail/random.hpp"

namespace grail {

struct SelectorParams {
  double epsilon = 0.1;
  double eta = 0.1;    // bandit step size
  double alpha = 0.1;  // Q-learning rate
  double gamma = 0.9;

  void validate() const;
};

// Epsilon-greedy bandit over goals; each value is an exponential moving
// average of the intrinsic rewards received for that goal.
class Bandit {
 public:
  Bandit(int n, double eta, double epsilon);

  int n() const { return static_cast<int>(values_.size()); }
  // Uniform goal with probability epsilon, otherwise argmax (uniform ties).
  // `greedy` forces epsilon to 0.
  GoalId select(Rng& rng, bool greedy = false) const;
  // v_g <- (1 - eta) v_g + eta r
  void update(GoalId g, double reward);

  const std::vector<double>& values() const { return values_; }
  double value(GoalId g) const { return values_[g]; }
  double max_abs_value() const;
  double epsilon() const { return epsilon_; }
  void set_epsilon(double epsilon) { epsilon_ = epsilon; }
  std::uint64_t fingerprint() const;

 private:
  double eta_;
  double epsilon_;
  std::vector<double> values_;
};

// Tabular action values over (context, goal). Rows exist only for contexts
// that have been updated; other contexts read as all-zero rows.
class GoalQTable {
 public:
  GoalQTable(int n, double alpha, double gamma, double epsilon);

  int n() const { return n_; }
  std::vector<double> row(Context ctx) const;
  double value(Context ctx, GoalId a) const;
  GoalId select(Context ctx, Rng& rng, bool greedy = false) const;
  // Q(s,a) += alpha (r + gamma max_b Q(s',b) [not terminal] - Q(s,a))
  void update(Context ctx, GoalId a, double reward, Context next,
              bool terminal);

  std::size_t visited_contexts() const { return rows_.size(); }
  const std::map<std::uint64_t, std::vector<double>>& rows() const {
    return rows_;
  }
  double epsilon() const { return epsilon_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  std::uint64_t fingerprint() const;

 private:
  int n_;
  double alpha_;
  double gamma_;
  double epsilon_;
  std::map<std::uint64_t, std::vector<double>> rows_;
};

// Reward fed to the goal-selection Q-learner after a trial on g: the
// competence progress of g, with g's outcome for this trial already recorded.
double mgrail_trial_reward(const CompetenceTracker& tracker, GoalId g);

// Two-level selector: a competence-progress bandit picks the target goal and
// a per-target Q-table, rewarded by achieving that target, picks which
// (sub-)goal to pursue in the current context.
class HierarchicalSelector {
 public:
  HierarchicalSelector(int n, const SelectorParams& params);

  int n() const { return target_bandit_.n(); }

  // Target is re-drawn from the bandit when `at_trial_start` (or when no
  // target is held yet); the sub-goal comes from that target's table.
  std::pair<GoalId, GoalId> select(Context ctx, Rng& rng,
                                   bool at_trial_start = true,
                                   bool greedy = false);
  GoalId select_subgoal(GoalId target, Context ctx, Rng& rng,
                        bool greedy = false) const;

  // Returns the intrinsic reward passed to the target bandit.
  double update(GoalId target, GoalId subgoal, Context ctx_prev,
                Context ctx_next, bool epoch_end, CompetenceTracker& tracker);

  const Bandit& target_bandit() const { return target_bandit_; }
  const GoalQTable& subgoal_table(GoalId target) const {
    return subgoal_q_[target];
  }
  std::optional<GoalId> current_target() const { return current_target_; }
  std::uint64_t fingerprint() const;

 private:
  Bandit target_bandit_;
  std::vector<GoalQTable> subgoal_q_;
  std::optional<GoalId> current_target_;
};

}  // namespace grail
