#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "grail/competence.hpp"
#include "grail/core.hpp"
#include "grail/environment.hpp"
#include "grail/random.hpp"
#include "grail/selectors.hpp"
#include "grail/skills.hpp"

namespace grail {

// BanditMDB: competence-progress bandit over goals, context-conditioned
// skills. MGRAIL: Q-learning goal selector over contexts, context-free
// skills. HGRAIL: bandit over targets plus per-target sub-goal Q-learning,
// context-free skills.
enum class AgentKind { kBanditMDB, kMGRAIL, kHGRAIL };

std::string to_string(AgentKind kind);
AgentKind parse_agent_kind(const std::string& s);
SkillVariant required_skill_variant(AgentKind kind);

struct AgentParams {
  SkillParams skills;
  // When set, must match the variant the agent kind requires.
  std::optional<SkillVariant> skill_variant;
  SelectorParams selector;
  int competence_window = CompetenceTracker::kDefaultWindow;
};

struct TrialRecord {
  GoalId target = 0;
  std::optional<GoalId> subgoal;  // HGRAIL only
  bool achieved = false;          // target lit at trial end
  int steps = 0;
  double selector_reward = 0.0;  // intrinsic reward passed to the selector
  Context ctx_before;
  Context ctx_after;
};

struct EpochLog {
  int epoch = 0;
  std::vector<TrialRecord> trials;
  std::vector<double> competence;  // per goal, after the epoch
  std::vector<int> selections;     // per goal, times chosen as target
  double max_abs_bandit_value = 0.0;  // 0 for MGRAIL
  std::size_t visited_contexts = 0;   // summed over Q-tables
};

struct EvalResult {
  double performance = 0.0;
  std::vector<bool> achieved;  // per goal
  // Lighting order within each goal's evaluation epoch.
  std::vector<std::vector<GoalId>> lit_orders;
};

class Agent {
 public:
  // Throws ValidationError if the skill variant does not match the kind.
  Agent(AgentKind kind, int n, const AgentParams& params, std::uint64_t seed);
  Agent(const Agent& other);
  Agent& operator=(const Agent&) = delete;

  AgentKind kind() const { return kind_; }
  int n() const { return n_; }

  // Resets the world for `epoch_index` and runs one epoch of training trials.
  EpochLog run_epoch(ButtonWorld& env, int epoch_index);

  // Frozen greedy evaluation on `graph`: one fresh epoch per goal, the
  // performance is the fraction of goals lit. Does not touch agent state.
  EvalResult evaluate(const WorldConfig& world, const DependencyGraph& graph,
                      std::uint64_t eval_seed) const;
  // Whether goal g lights within one fresh greedy epoch.
  bool evaluate_goal(ButtonWorld& env, GoalId g, Rng& rng) const;

  const CompetenceTracker& tracker() const { return tracker_; }
  const SkillSet& skills() const { return *skills_; }
  const Bandit* bandit() const;
  const GoalQTable* goal_table() const {
    return goal_q_ ? &*goal_q_ : nullptr;
  }
  const HierarchicalSelector* hierarchical() const {
    return hgrail_ ? &*hgrail_ : nullptr;
  }
  std::uint64_t fingerprint() const;

 private:
  TrialRecord run_trial(ButtonWorld& env, bool last_trial);

  AgentKind kind_;
  int n_;
  Rng rng_;
  CompetenceTracker tracker_;
  std::unique_ptr<SkillSet> skills_;
  std::optional<Bandit> bandit_;
  std::optional<GoalQTable> goal_q_;
  std::optional<HierarchicalSelector> hgrail_;
};

}  // namespace grail
