#pragma once

#include <deque>
#include <vector>

#include "grail/core.hpp"

namespace grail {

// Per-goal sliding window of target-attempt outcomes. Competence is the
// window mean; the intrinsic reward is the competence progress measured as
// the difference between the newer and older halves of the window.
class CompetenceTracker {
 public:
  static constexpr int kDefaultWindow = 20;

  explicit CompetenceTracker(int n, int window = kDefaultWindow);

  int n() const { return static_cast<int>(buffers_.size()); }
  int window() const { return window_; }

  // Throws InvalidGoal for g outside [0, n).
  void record_attempt(GoalId g, bool success);

  // Mean of g's window; 0 for a goal never attempted.
  double competence(GoalId g) const;
  // mean(newer half) - mean(older half); the newer half takes the extra
  // sample when the count is odd. 0 with fewer than two samples.
  double intrinsic_reward(GoalId g) const;
  // Uniform average of competence over all goals.
  double overall_competence() const;

  const std::deque<bool>& history(GoalId g) const;
  long attempts(GoalId g) const;

 private:
  void check(GoalId g) const;

  int window_;
  std::vector<std::deque<bool>> buffers_;
  std::vector<long> attempts_;
};

}  // namespace grail
