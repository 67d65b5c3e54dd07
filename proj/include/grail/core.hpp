#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace grail {

// Dense goal (button) index in [0, n).
using GoalId = int;

inline constexpr int kMaxGoals = 64;

// Set of goals achieved so far in the current epoch (lit buttons).
class Context {
 public:
  constexpr Context() = default;
  constexpr explicit Context(std::uint64_t bits) : bits_(bits) {}

  constexpr bool test(GoalId g) const { return (bits_ >> g) & 1u; }
  constexpr void set(GoalId g) { bits_ |= std::uint64_t{1} << g; }
  constexpr Context with(GoalId g) const {
    return Context(bits_ | (std::uint64_t{1} << g));
  }
  constexpr std::uint64_t bits() const { return bits_; }
  constexpr int count() const { return std::popcount(bits_); }
  constexpr bool contains_all(std::uint64_t mask) const {
    return (bits_ & mask) == mask;
  }
  // "101000" style, goal 0 first.
  std::string to_string(int n) const;

  friend constexpr bool operator==(Context, Context) = default;

 private:
  std::uint64_t bits_ = 0;
};

using ParentMap = std::map<GoalId, std::set<GoalId>>;

// Throws DanglingGoal or CycleDetected. Self-loops are reported as cycles.
void validate_graph(const ParentMap& parents, int n);

// Conjunctive precondition DAG: a goal can be lit only once all of its
// parents are lit.
class DependencyGraph {
 public:
  // Validates; throws on cycles or out-of-range ids.
  DependencyGraph(int n, const ParentMap& parents);
  // Graph with no dependencies.
  explicit DependencyGraph(int n);

  int n() const { return n_; }
  const std::vector<GoalId>& parents(GoalId g) const { return parents_[g]; }
  std::uint64_t parent_mask(GoalId g) const { return parent_mask_[g]; }
  // Transitive closure of parents.
  std::uint64_t ancestor_mask(GoalId g) const { return ancestor_mask_[g]; }
  // Ancestors of g in topological order (g itself excluded).
  std::vector<GoalId> ancestors_in_order(GoalId g) const;
  // Deterministic (smallest-id-first Kahn) topological order.
  const std::vector<GoalId>& topological_order() const { return topo_; }
  ParentMap parent_map() const;

  friend bool operator==(const DependencyGraph& a, const DependencyGraph& b) {
    return a.n_ == b.n_ && a.parent_mask_ == b.parent_mask_;
  }

 private:
  int n_;
  std::vector<std::vector<GoalId>> parents_;
  std::vector<std::uint64_t> parent_mask_;
  std::vector<std::uint64_t> ancestor_mask_;
  std::vector<GoalId> topo_;
};

bool preconditions_satisfied(const DependencyGraph& graph, GoalId g,
                             Context ctx);

// Piecewise-constant graph over epochs.
class GraphSchedule {
 public:
  struct Segment {
    int start_epoch;
    DependencyGraph graph;
  };

  // First segment must start at epoch 0; starts strictly increasing; all
  // graphs over the same n.
  explicit GraphSchedule(std::vector<Segment> segments);
  explicit GraphSchedule(DependencyGraph graph);

  const DependencyGraph& graph_at(int epoch) const;
  const std::vector<Segment>& segments() const { return segments_; }
  // Start epochs of every segment after the first.
  std::vector<int> switch_epochs() const;
  int n() const { return segments_.front().graph.n(); }

 private:
  std::vector<Segment> segments_;
};

struct Observation {
  std::vector<double> distances;  // Chebyshev distance to each button
  Context states;

  friend bool operator==(const Observation&, const Observation&) = default;
};

}  // namespace grail
