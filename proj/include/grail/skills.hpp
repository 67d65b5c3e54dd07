#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "grail/core.hpp"
#include "grail/environment.hpp"
#include "grail/random.hpp"

namespace grail {

// ContextFree skills see only the effector; ContextConditioned skills also
// see which of their target's ancestors are lit.
enum class SkillVariant { kContextFree, kContextConditioned };
enum class SkillBackend { kScripted, kGridLearner };

std::string to_string(SkillVariant v);
std::string to_string(SkillBackend b);
SkillBackend parse_skill_backend(const std::string& s);
SkillVariant parse_skill_variant(const std::string& s);

struct SkillParams {
  SkillBackend backend = SkillBackend::kScripted;
  // Scripted reach model.
  double p0 = 0.02;
  double tau = 30.0;
  // Tabular grid learner.
  double alpha = 0.3;
  double gamma = 0.95;
  double epsilon0 = 0.3;
  double epsilon_decay = 0.999;

  void validate() const;
};

// Probability that a scripted press succeeds after m practice presses:
// 1 - (1 - p0) * exp(-m / tau).
double reach_probability(double p0, double tau, double practice);

// What a grid skill observes: effector cell plus the lit bits it conditions
// on (always 0 for ContextFree skills).
struct GridState {
  int cell = 0;
  std::uint64_t ctx_bits = 0;
  friend auto operator<=>(const GridState&, const GridState&) = default;
};

// One environment step as seen by a grid skill.
struct GridTransition {
  GridState state;
  Action action;
  double reward;
  GridState next_state;
  bool terminal;
};

// Everything a skill needs to learn from the trial it just ran.
struct SkillTrace {
  TrialOutcome outcome;
  std::vector<GoalId> presses;  // scripted: press attempts in order
  std::vector<GridTransition> transitions;  // grid learner
};

// The per-goal low-level policies of one agent.
class SkillSet {
 public:
  virtual ~SkillSet() = default;

  int n() const { return n_; }
  SkillVariant variant() const { return variant_; }
  virtual SkillBackend backend() const = 0;

  // Runs one trial of the target's skill in `env`. With explore=false the
  // grid learner acts greedily. Never mutates the skill state.
  virtual SkillTrace execute(ButtonWorld& env, GoalId target, Rng& rng,
                             bool explore) const = 0;
  // Learns from a trace produced by execute on the same target.
  virtual void update(GoalId target, const SkillTrace& trace) = 0;

  virtual std::uint64_t fingerprint() const = 0;
  virtual std::unique_ptr<SkillSet> clone() const = 0;

 protected:
  SkillSet(int n, SkillVariant variant) : n_(n), variant_(variant) {}

 private:
  int n_;
  SkillVariant variant_;
};

// Closed-form practice model. ContextFree: one press of the target, reach
// succeeding with p(m_g). ContextConditioned: presses the unlit ancestors
// in topological order and then the target, each with p(m_{g,h}); the trial
// stops at the first failed reach.
class ScriptedSkills final : public SkillSet {
 public:
  ScriptedSkills(int n, SkillVariant variant, double p0, double tau);

  SkillBackend backend() const override { return SkillBackend::kScripted; }
  SkillTrace execute(ButtonWorld& env, GoalId target, Rng& rng,
                     bool explore) const override;
  void update(GoalId target, const SkillTrace& trace) override;
  std::uint64_t fingerprint() const override;
  std::unique_ptr<SkillSet> clone() const override;

  // m_g (ContextFree) or m_{target,element} (ContextConditioned).
  long practice(GoalId target, GoalId element) const;
  double press_probability(GoalId target, GoalId element) const;

 private:
  double p0_;
  double tau_;
  std::vector<long> counts_;  // n x n, row = target
};

// Tabular Q-learning over grid cells (plus ancestor bits when context
// conditioned). Reward 1 on the step that lights the target.
class GridSkills final : public SkillSet {
 public:
  using Row = std::array<double, kNumActions>;

  GridSkills(int n, SkillVariant variant, const SkillParams& params);

  SkillBackend backend() const override { return SkillBackend::kGridLearner; }
  SkillTrace execute(ButtonWorld& env, GoalId target, Rng& rng,
                     bool explore) const override;
  void update(GoalId target, const SkillTrace& trace) override;
  std::uint64_t fingerprint() const override;
  std::unique_ptr<SkillSet> clone() const override;

  GridState observe(const ButtonWorld& env, GoalId target) const;
  // Zero row for states never updated.
  Row q(GoalId target, const GridState& state) const;
  double epsilon(GoalId target) const { return epsilon_[target]; }

 private:
  SkillParams params_;
  std::vector<std::map<GridState, Row>> tables_;
  std::vector<double> epsilon_;
};

std::unique_ptr<SkillSet> make_skill_set(int n, SkillVariant variant,
                                         const SkillParams& params);

}  // namespace grail
