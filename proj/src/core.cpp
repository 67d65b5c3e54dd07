#include "grail/core.hpp"

#include <algorithm>
#include <functional>
#include <queue>

#include "grail/errors.hpp"

namespace grail {

std::string Context::to_string(int n) const {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int g = 0; g < n; ++g) {
    if (test(g)) s[static_cast<std::size_t>(g)] = '1';
  }
  return s;
}

void validate_graph(const ParentMap& parents, int n) {
  if (n < 1 || n > kMaxGoals) {
    throw ValidationError("n", "must be in [1, " + std::to_string(kMaxGoals) +
                                   "], got " + std::to_string(n));
  }
  for (const auto& [child, ps] : parents) {
    if (child < 0 || child >= n) throw DanglingGoal(child, n);
    for (GoalId p : ps) {
      if (p < 0 || p >= n) throw DanglingGoal(p, n);
    }
  }

  // Recursive DFS; depth is bounded by n <= 64.
  enum class Mark { kNew, kActive, kDone };
  std::vector<Mark> mark(static_cast<std::size_t>(n), Mark::kNew);
  std::vector<GoalId> path;
  std::function<void(GoalId)> visit = [&](GoalId g) {
    mark[g] = Mark::kActive;
    path.push_back(g);
    if (auto it = parents.find(g); it != parents.end()) {
      for (GoalId p : it->second) {
        if (mark[p] == Mark::kActive) {
          auto start = std::find(path.begin(), path.end(), p);
          std::vector<int> cycle(start, path.end());
          cycle.push_back(p);
          throw CycleDetected(std::move(cycle));
        }
        if (mark[p] == Mark::kNew) visit(p);
      }
    }
    path.pop_back();
    mark[g] = Mark::kDone;
  };
  for (GoalId g = 0; g < n; ++g) {
    if (mark[g] == Mark::kNew) visit(g);
  }
}

DependencyGraph::DependencyGraph(int n) : DependencyGraph(n, ParentMap{}) {}

DependencyGraph::DependencyGraph(int n, const ParentMap& parents) : n_(n) {
  validate_graph(parents, n);
  parents_.resize(static_cast<std::size_t>(n));
  parent_mask_.assign(static_cast<std::size_t>(n), 0);
  for (const auto& [child, ps] : parents) {
    for (GoalId p : ps) {
      parents_[child].push_back(p);
      parent_mask_[child] |= std::uint64_t{1} << p;
    }
  }

  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<GoalId>> children(static_cast<std::size_t>(n));
  for (GoalId g = 0; g < n; ++g) {
    indegree[g] = static_cast<int>(parents_[g].size());
    for (GoalId p : parents_[g]) children[p].push_back(g);
  }
  std::priority_queue<GoalId, std::vector<GoalId>, std::greater<>> ready;
  for (GoalId g = 0; g < n; ++g) {
    if (indegree[g] == 0) ready.push(g);
  }
  while (!ready.empty()) {
    GoalId g = ready.top();
    ready.pop();
    topo_.push_back(g);
    for (GoalId c : children[g]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }

  ancestor_mask_.assign(static_cast<std::size_t>(n), 0);
  for (GoalId g : topo_) {
    for (GoalId p : parents_[g]) {
      ancestor_mask_[g] |= ancestor_mask_[p] | (std::uint64_t{1} << p);
    }
  }
}

std::vector<GoalId> DependencyGraph::ancestors_in_order(GoalId g) const {
  std::vector<GoalId> out;
  for (GoalId a : topo_) {
    if ((ancestor_mask_[g] >> a) & 1u) out.push_back(a);
  }
  return out;
}

ParentMap DependencyGraph::parent_map() const {
  ParentMap out;
  for (GoalId g = 0; g < n_; ++g) {
    if (!parents_[g].empty()) {
      out[g] = std::set<GoalId>(parents_[g].begin(), parents_[g].end());
    }
  }
  return out;
}

bool preconditions_satisfied(const DependencyGraph& graph, GoalId g,
                             Context ctx) {
  if (g < 0 || g >= graph.n()) throw InvalidGoal(g, graph.n());
  return ctx.contains_all(graph.parent_mask(g));
}

GraphSchedule::GraphSchedule(DependencyGraph graph)
    : segments_{Segment{0, std::move(graph)}} {}

GraphSchedule::GraphSchedule(std::vector<Segment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) {
    throw ValidationError("schedule", "at least one segment is required");
  }
  if (segments_.front().start_epoch != 0) {
    throw ValidationError("schedule", "first segment must start at epoch 0");
  }
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    if (segments_[i].start_epoch <= segments_[i - 1].start_epoch) {
      throw ValidationError("schedule",
                            "segment start epochs must be strictly increasing");
    }
    if (segments_[i].graph.n() != segments_.front().graph.n()) {
      throw ValidationError("schedule", "all segments must share n");
    }
  }
}

const DependencyGraph& GraphSchedule::graph_at(int epoch) const {
  if (epoch < 0) throw ValidationError("epoch", "must be non-negative");
  auto it = std::upper_bound(
      segments_.begin(), segments_.end(), epoch,
      [](int e, const Segment& s) { return e < s.start_epoch; });
  return std::prev(it)->graph;
}

std::vector<int> GraphSchedule::switch_epochs() const {
  std::vector<int> out;
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    out.push_back(segments_[i].start_epoch);
  }
  return out;
}

}  // namespace grail
