#include "grail/agents.hpp"

#include <sstream>

#include "grail/errors.hpp"
#include "grail/fingerprint.hpp"

namespace grail {

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kBanditMDB:
      return "BanditMDB";
    case AgentKind::kMGRAIL:
      return "MGRAIL";
    case AgentKind::kHGRAIL:
      return "HGRAIL";
  }
  return "?";
}

AgentKind parse_agent_kind(const std::string& s) {
  if (s == "BanditMDB") return AgentKind::kBanditMDB;
  if (s == "MGRAIL") return AgentKind::kMGRAIL;
  if (s == "HGRAIL") return AgentKind::kHGRAIL;
  throw ValidationError("agent", "expected BanditMDB, MGRAIL or HGRAIL, got '" +
                                     s + "'");
}

SkillVariant required_skill_variant(AgentKind kind) {
  return kind == AgentKind::kBanditMDB ? SkillVariant::kContextConditioned
                                       : SkillVariant::kContextFree;
}

Agent::Agent(AgentKind kind, int n, const AgentParams& params,
             std::uint64_t seed)
    : kind_(kind),
      n_(n),
      rng_(seed),
      tracker_(n, params.competence_window) {
  params.selector.validate();
  const SkillVariant variant = required_skill_variant(kind);
  if (params.skill_variant && *params.skill_variant != variant) {
    throw ValidationError("skills.variant",
                          to_string(kind) + " requires " + to_string(variant) +
                              " skills, got " +
                              to_string(*params.skill_variant));
  }
  skills_ = make_skill_set(n, variant, params.skills);
  const auto& sp = params.selector;
  switch (kind) {
    case AgentKind::kBanditMDB:
      bandit_.emplace(n, sp.eta, sp.epsilon);
      break;
    case AgentKind::kMGRAIL:
      goal_q_.emplace(n, sp.alpha, sp.gamma, sp.epsilon);
      break;
    case AgentKind::kHGRAIL:
      hgrail_.emplace(n, sp);
      break;
  }
}

Agent::Agent(const Agent& other)
    : kind_(other.kind_),
      n_(other.n_),
      rng_(other.rng_),
      tracker_(other.tracker_),
      skills_(other.skills_->clone()),
      bandit_(other.bandit_),
      goal_q_(other.goal_q_),
      hgrail_(other.hgrail_) {}

const Bandit* Agent::bandit() const {
  if (bandit_) return &*bandit_;
  if (hgrail_) return &hgrail_->target_bandit();
  return nullptr;
}

TrialRecord Agent::run_trial(ButtonWorld& env, bool last_trial) {
  TrialRecord rec;
  const Context before = env.state().ctx;
  rec.ctx_before = before;

  switch (kind_) {
    case AgentKind::kBanditMDB: {
      GoalId g = bandit_->select(rng_);
      SkillTrace trace = skills_->execute(env, g, rng_, true);
      skills_->update(g, trace);
      if (!before.test(g)) {
        tracker_.record_attempt(g, trace.outcome.achieved);
        rec.selector_reward = tracker_.intrinsic_reward(g);
      }
      bandit_->update(g, rec.selector_reward);
      rec.target = g;
      rec.steps = trace.outcome.steps_used;
      break;
    }
    case AgentKind::kMGRAIL: {
      GoalId g = goal_q_->select(before, rng_);
      SkillTrace trace = skills_->execute(env, g, rng_, true);
      skills_->update(g, trace);
      if (!before.test(g)) {
        tracker_.record_attempt(g, trace.outcome.achieved);
        rec.selector_reward = mgrail_trial_reward(tracker_, g);
      }
      goal_q_->update(before, g, rec.selector_reward, env.state().ctx,
                      last_trial);
      rec.target = g;
      rec.steps = trace.outcome.steps_used;
      break;
    }
    case AgentKind::kHGRAIL: {
      auto [target, subgoal] = hgrail_->select(before, rng_);
      SkillTrace trace = skills_->execute(env, subgoal, rng_, true);
      skills_->update(subgoal, trace);
      rec.selector_reward = hgrail_->update(target, subgoal, before,
                                            env.state().ctx, last_trial,
                                            tracker_);
      rec.target = target;
      rec.subgoal = subgoal;
      rec.steps = trace.outcome.steps_used;
      break;
    }
  }
  rec.ctx_after = env.state().ctx;
  rec.achieved = rec.ctx_after.test(rec.target);
  return rec;
}

EpochLog Agent::run_epoch(ButtonWorld& env, int epoch_index) {
  if (env.n() != n_) throw ValidationError("n", "agent and world disagree");
  env.reset_epoch(epoch_index);
  const int trials = env.config().trials_per_epoch;

  EpochLog log;
  log.epoch = epoch_index;
  log.selections.assign(static_cast<std::size_t>(n_), 0);
  for (int t = 0; t < trials; ++t) {
    TrialRecord rec = run_trial(env, t + 1 == trials);
    ++log.selections[rec.target];
    log.trials.push_back(std::move(rec));
  }

  log.competence.reserve(static_cast<std::size_t>(n_));
  for (GoalId g = 0; g < n_; ++g) log.competence.push_back(tracker_.competence(g));
  if (const Bandit* b = bandit()) log.max_abs_bandit_value = b->max_abs_value();
  if (goal_q_) log.visited_contexts = goal_q_->visited_contexts();
  if (hgrail_) {
    for (GoalId g = 0; g < n_; ++g) {
      log.visited_contexts += hgrail_->subgoal_table(g).visited_contexts();
    }
  }
  return log;
}

bool Agent::evaluate_goal(ButtonWorld& env, GoalId g, Rng& rng) const {
  const int trials = env.config().trials_per_epoch;
  for (int t = 0; t < trials && !env.state().ctx.test(g); ++t) {
    const Context ctx = env.state().ctx;
    GoalId pursued = g;
    switch (kind_) {
      case AgentKind::kBanditMDB:
        break;
      case AgentKind::kMGRAIL:
        pursued = goal_q_->select(ctx, rng, /*greedy=*/true);
        break;
      case AgentKind::kHGRAIL:
        pursued = hgrail_->select_subgoal(g, ctx, rng, /*greedy=*/true);
        break;
    }
    skills_->execute(env, pursued, rng, /*explore=*/false);
  }
  return env.state().ctx.test(g);
}

EvalResult Agent::evaluate(const WorldConfig& world,
                           const DependencyGraph& graph,
                           std::uint64_t eval_seed) const {
  EvalResult result;
  int hits = 0;
  for (GoalId g = 0; g < n_; ++g) {
    ButtonWorld env(world, GraphSchedule(graph));
    Rng rng(derive_seed(eval_seed, static_cast<std::uint64_t>(g)));
    const bool ok = evaluate_goal(env, g, rng);
    hits += ok ? 1 : 0;
    result.achieved.push_back(ok);
    result.lit_orders.push_back(env.lit_order());
  }
  result.performance = static_cast<double>(hits) / n_;
  return result;
}

std::uint64_t Agent::fingerprint() const {
  Fingerprint fp;
  std::ostringstream rng_state;
  rng_state << rng_;
  for (char c : rng_state.str()) fp.add(static_cast<int>(c));
  for (GoalId g = 0; g < n_; ++g) {
    for (bool b : tracker_.history(g)) fp.add(b ? 1 : 0);
    fp.add(tracker_.attempts(g));
  }
  fp.add(skills_->fingerprint());
  if (bandit_) fp.add(bandit_->fingerprint());
  if (goal_q_) fp.add(goal_q_->fingerprint());
  if (hgrail_) fp.add(hgrail_->fingerprint());
  return fp.value();
}

}  // namespace grail
