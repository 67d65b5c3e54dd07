#include "grail/skills.hpp"

#include <algorithm>
#include <cmath>

#include "grail/errors.hpp"
#include "grail/fingerprint.hpp"

namespace grail {

std::string to_string(SkillVariant v) {
  return v == SkillVariant::kContextFree ? "context_free"
                                         : "context_conditioned";
}

std::string to_string(SkillBackend b) {
  return b == SkillBackend::kScripted ? "scripted" : "grid";
}

SkillBackend parse_skill_backend(const std::string& s) {
  if (s == "scripted") return SkillBackend::kScripted;
  if (s == "grid") return SkillBackend::kGridLearner;
  throw ValidationError("skills.backend",
                        "expected 'scripted' or 'grid', got '" + s + "'");
}

SkillVariant parse_skill_variant(const std::string& s) {
  if (s == "context_free") return SkillVariant::kContextFree;
  if (s == "context_conditioned") return SkillVariant::kContextConditioned;
  throw ValidationError(
      "skills.variant",
      "expected 'context_free' or 'context_conditioned', got '" + s + "'");
}

void SkillParams::validate() const {
  if (!(p0 >= 0.0 && p0 < 1.0)) {
    throw ValidationError("skills.p0", "must be in [0, 1)");
  }
  if (!(tau > 0.0)) throw ValidationError("skills.tau", "must be > 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ValidationError("skills.alpha", "must be in (0, 1]");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw ValidationError("skills.gamma", "must be in [0, 1)");
  }
  if (!(epsilon0 >= 0.0 && epsilon0 <= 1.0)) {
    throw ValidationError("skills.epsilon0", "must be in [0, 1]");
  }
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) {
    throw ValidationError("skills.epsilon_decay", "must be in (0, 1]");
  }
}

double reach_probability(double p0, double tau, double practice) {
  return 1.0 - (1.0 - p0) * std::exp(-practice / tau);
}

// ---------------------------------------------------------------------------
// ScriptedSkills

ScriptedSkills::ScriptedSkills(int n, SkillVariant variant, double p0,
                               double tau)
    : SkillSet(n, variant),
      p0_(p0),
      tau_(tau),
      counts_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0) {}

long ScriptedSkills::practice(GoalId target, GoalId element) const {
  return counts_[static_cast<std::size_t>(target * n() + element)];
}

double ScriptedSkills::press_probability(GoalId target, GoalId element) const {
  return reach_probability(p0_, tau_,
                           static_cast<double>(practice(target, element)));
}

SkillTrace ScriptedSkills::execute(ButtonWorld& env, GoalId target, Rng& rng,
                                   bool /*explore*/) const {
  SkillTrace trace;
  env.begin_trial(target);
  if (env.state().ctx.test(target)) {
    trace.outcome = env.end_trial();
    return trace;
  }

  std::vector<GoalId> chain;
  if (variant() == SkillVariant::kContextConditioned) {
    for (GoalId a : env.graph().ancestors_in_order(target)) {
      if (!env.state().ctx.test(a)) chain.push_back(a);
    }
  }
  chain.push_back(target);

  for (GoalId element : chain) {
    trace.presses.push_back(element);
    if (!bernoulli(rng, press_probability(target, element))) {
      env.exhaust_trial();
      break;
    }
    auto result = env.press(element);
    if (!result.newly_lit) {
      // Reached the button but it stayed dark: preconditions unmet.
      env.exhaust_trial();
      break;
    }
  }
  trace.outcome = env.end_trial();
  return trace;
}

void ScriptedSkills::update(GoalId target, const SkillTrace& trace) {
  for (GoalId element : trace.presses) {
    ++counts_[static_cast<std::size_t>(target * n() + element)];
  }
}

std::uint64_t ScriptedSkills::fingerprint() const {
  Fingerprint fp;
  for (long c : counts_) fp.add(c);
  return fp.value();
}

std::unique_ptr<SkillSet> ScriptedSkills::clone() const {
  return std::make_unique<ScriptedSkills>(*this);
}

// ---------------------------------------------------------------------------
// GridSkills

GridSkills::GridSkills(int n, SkillVariant variant, const SkillParams& params)
    : SkillSet(n, variant),
      params_(params),
      tables_(static_cast<std::size_t>(n)),
      epsilon_(static_cast<std::size_t>(n), params.epsilon0) {}

GridState GridSkills::observe(const ButtonWorld& env, GoalId target) const {
  const auto& e = env.state().effector;
  GridState s;
  s.cell = e.y * env.config().grid_w + e.x;
  if (variant() == SkillVariant::kContextConditioned) {
    s.ctx_bits = env.state().ctx.bits() & env.graph().ancestor_mask(target);
  }
  return s;
}

GridSkills::Row GridSkills::q(GoalId target, const GridState& state) const {
  const auto& table = tables_[target];
  if (auto it = table.find(state); it != table.end()) return it->second;
  return Row{};
}

SkillTrace GridSkills::execute(ButtonWorld& env, GoalId target, Rng& rng,
                               bool explore) const {
  SkillTrace trace;
  const double eps = explore ? epsilon_[target] : 0.0;
  GridState current = observe(env, target);

  auto policy = [&](const Observation&, const WorldState&) {
    Row row = q(target, current);
    return static_cast<Action>(epsilon_greedy(row, eps, rng));
  };
  auto on_step = [&](Action a, const StepResult& r) {
    GridState next = observe(env, target);
    const bool lit = r.newly_lit && *r.newly_lit == target;
    trace.transitions.push_back(
        GridTransition{current, a, lit ? 1.0 : 0.0, next, lit});
    current = next;
  };
  trace.outcome = env.run_trial(policy, target, on_step);
  return trace;
}

void GridSkills::update(GoalId target, const SkillTrace& trace) {
  auto& table = tables_[target];
  for (const auto& t : trace.transitions) {
    double bootstrap = 0.0;
    if (!t.terminal) {
      Row next = q(target, t.next_state);
      bootstrap = *std::max_element(next.begin(), next.end());
    }
    double& entry = table[t.state][static_cast<std::size_t>(t.action)];
    entry += params_.alpha * (t.reward + params_.gamma * bootstrap - entry);
  }
  if (!trace.transitions.empty()) epsilon_[target] *= params_.epsilon_decay;
}

std::uint64_t GridSkills::fingerprint() const {
  Fingerprint fp;
  for (const auto& table : tables_) {
    fp.add(static_cast<std::uint64_t>(table.size()));
    for (const auto& [state, row] : table) {
      fp.add(state.cell);
      fp.add(state.ctx_bits);
      for (double v : row) fp.add(v);
    }
  }
  for (double e : epsilon_) fp.add(e);
  return fp.value();
}

std::unique_ptr<SkillSet> GridSkills::clone() const {
  return std::make_unique<GridSkills>(*this);
}

std::unique_ptr<SkillSet> make_skill_set(int n, SkillVariant variant,
                                         const SkillParams& params) {
  params.validate();
  if (params.backend == SkillBackend::kScripted) {
    return std::make_unique<ScriptedSkills>(n, variant, params.p0, params.tau);
  }
  return std::make_unique<GridSkills>(n, variant, params);
}

}  // namespace grail
