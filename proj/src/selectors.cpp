#include "grail/selectors.hpp"

#include <algorithm>
#include <cmath>

#include "grail/errors.hpp"
#include "grail/fingerprint.hpp"

namespace grail {

void SelectorParams::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ValidationError("selector.epsilon", "must be in [0, 1]");
  }
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw ValidationError("selector.eta", "must be in (0, 1]");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ValidationError("selector.alpha", "must be in (0, 1]");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw ValidationError("selector.gamma", "must be in [0, 1)");
  }
}

Bandit::Bandit(int n, double eta, double epsilon)
    : eta_(eta), epsilon_(epsilon), values_(static_cast<std::size_t>(n), 0.0) {
  if (n < 1) throw ValidationError("n", "must be >= 1");
}

GoalId Bandit::select(Rng& rng, bool greedy) const {
  return epsilon_greedy(values_, greedy ? 0.0 : epsilon_, rng);
}

void Bandit::update(GoalId g, double reward) {
  if (g < 0 || g >= n()) throw InvalidGoal(g, n());
  values_[g] = (1.0 - eta_) * values_[g] + eta_ * reward;
}

double Bandit::max_abs_value() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::uint64_t Bandit::fingerprint() const {
  Fingerprint fp;
  for (double v : values_) fp.add(v);
  fp.add(epsilon_);
  return fp.value();
}

GoalQTable::GoalQTable(int n, double alpha, double gamma, double epsilon)
    : n_(n), alpha_(alpha), gamma_(gamma), epsilon_(epsilon) {
  if (n < 1) throw ValidationError("n", "must be >= 1");
}

std::vector<double> GoalQTable::row(Context ctx) const {
  if (auto it = rows_.find(ctx.bits()); it != rows_.end()) return it->second;
  return std::vector<double>(static_cast<std::size_t>(n_), 0.0);
}

double GoalQTable::value(Context ctx, GoalId a) const {
  if (auto it = rows_.find(ctx.bits()); it != rows_.end()) return it->second[a];
  return 0.0;
}

GoalId GoalQTable::select(Context ctx, Rng& rng, bool greedy) const {
  return epsilon_greedy(row(ctx), greedy ? 0.0 : epsilon_, rng);
}

void GoalQTable::update(Context ctx, GoalId a, double reward, Context next,
                        bool terminal) {
  if (a < 0 || a >= n_) throw InvalidGoal(a, n_);
  double bootstrap = 0.0;
  if (!terminal) {
    if (auto it = rows_.find(next.bits()); it != rows_.end()) {
      bootstrap = *std::max_element(it->second.begin(), it->second.end());
    }
  }
  auto [it, inserted] = rows_.try_emplace(
      ctx.bits(), std::vector<double>(static_cast<std::size_t>(n_), 0.0));
  double& q = it->second[a];
  q += alpha_ * (reward + gamma_ * bootstrap - q);
}

std::uint64_t GoalQTable::fingerprint() const {
  Fingerprint fp;
  for (const auto& [ctx, values] : rows_) {
    fp.add(ctx);
    for (double v : values) fp.add(v);
  }
  return fp.value();
}

double mgrail_trial_reward(const CompetenceTracker& tracker, GoalId g) {
  return tracker.intrinsic_reward(g);
}

HierarchicalSelector::HierarchicalSelector(int n, const SelectorParams& params)
    : target_bandit_(n, params.eta, params.epsilon) {
  subgoal_q_.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    subgoal_q_.emplace_back(n, params.alpha, params.gamma, params.epsilon);
  }
}

std::pair<GoalId, GoalId> HierarchicalSelector::select(Context ctx, Rng& rng,
                                                       bool at_trial_start,
                                                       bool greedy) {
  if (at_trial_start || !current_target_) {
    current_target_ = target_bandit_.select(rng, greedy);
  }
  GoalId target = *current_target_;
  return {target, select_subgoal(target, ctx, rng, greedy)};
}

GoalId HierarchicalSelector::select_subgoal(GoalId target, Context ctx,
                                            Rng& rng, bool greedy) const {
  return subgoal_q_[target].select(ctx, rng, greedy);
}

double HierarchicalSelector::update(GoalId target, GoalId subgoal,
                                    Context ctx_prev, Context ctx_next,
                                    bool epoch_end,
                                    CompetenceTracker& tracker) {
  const bool achieved = ctx_next.test(target);
  const double extrinsic = achieved ? 1.0 : 0.0;
  subgoal_q_[target].update(ctx_prev, subgoal, extrinsic, ctx_next,
                            epoch_end || achieved);
  // A target already lit at trial start was not attempted: no competence
  // sample and no progress.
  double intrinsic = 0.0;
  if (!ctx_prev.test(target)) {
    tracker.record_attempt(target, achieved);
    intrinsic = tracker.intrinsic_reward(target);
  }
  target_bandit_.update(target, intrinsic);
  return intrinsic;
}

std::uint64_t HierarchicalSelector::fingerprint() const {
  Fingerprint fp;
  fp.add(target_bandit_.fingerprint());
  for (const auto& table : subgoal_q_) fp.add(table.fingerprint());
  fp.add(current_target_ ? *current_target_ : -1);
  return fp.value();
}

}  // namespace grail
