#include "grail/competence.hpp"

#include <algorithm>

#include "grail/errors.hpp"

namespace grail {

CompetenceTracker::CompetenceTracker(int n, int window)
    : window_(window),
      buffers_(static_cast<std::size_t>(n)),
      attempts_(static_cast<std::size_t>(n), 0) {
  if (n < 1) throw ValidationError("n", "must be >= 1");
  if (window < 2) throw ValidationError("competence.window", "must be >= 2");
}

void CompetenceTracker::check(GoalId g) const {
  if (g < 0 || g >= n()) throw InvalidGoal(g, n());
}

void CompetenceTracker::record_attempt(GoalId g, bool success) {
  check(g);
  auto& buf = buffers_[g];
  buf.push_back(success);
  if (static_cast<int>(buf.size()) > window_) buf.pop_front();
  ++attempts_[g];
}

double CompetenceTracker::competence(GoalId g) const {
  check(g);
  const auto& buf = buffers_[g];
  if (buf.empty()) return 0.0;
  auto hits = std::count(buf.begin(), buf.end(), true);
  return static_cast<double>(hits) / static_cast<double>(buf.size());
}

double CompetenceTracker::intrinsic_reward(GoalId g) const {
  check(g);
  const auto& buf = buffers_[g];
  const auto size = static_cast<std::ptrdiff_t>(buf.size());
  if (size < 2) return 0.0;
  const std::ptrdiff_t older = size / 2;
  const std::ptrdiff_t newer = size - older;
  auto split = buf.begin() + older;
  double old_mean =
      static_cast<double>(std::count(buf.begin(), split, true)) / older;
  double new_mean =
      static_cast<double>(std::count(split, buf.end(), true)) / newer;
  return new_mean - old_mean;
}

double CompetenceTracker::overall_competence() const {
  double sum = 0.0;
  for (GoalId g = 0; g < n(); ++g) sum += competence(g);
  return sum / n();
}

const std::deque<bool>& CompetenceTracker::history(GoalId g) const {
  check(g);
  return buffers_[g];
}

long CompetenceTracker::attempts(GoalId g) const {
  check(g);
  return attempts_[g];
}

}  // namespace grail
