#include <gtest/gtest.h>

#include <cmath>

#include "checks.hpp"
#include "grail/errors.hpp"
#include "grail/selectors.hpp"

using namespace grail;

namespace {

// Frequencies of `draw()` outcomes over `draws` calls, each within 3 sigma
// of probability p[k].
template <class Draw>
void expect_frequencies(Draw draw, const std::vector<double>& p, int draws) {
  std::vector<int> counts(p.size(), 0);
  for (int i = 0; i < draws; ++i) ++counts[draw()];
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double sigma = std::sqrt(draws * p[k] * (1 - p[k]));
    EXPECT_NEAR(counts[k], draws * p[k], 3 * sigma + 1e-9) << "outcome " << k;
  }
}

}  // namespace

TEST(SelectorParams, Validation) {
  SelectorParams p;
  EXPECT_NO_THROW(p.validate());
  p.epsilon = 1.5;
  EXPECT_THROW(p.validate(), ValidationError);
  p = {};
  p.gamma = 1.0;
  EXPECT_THROW(p.validate(), ValidationError);
  p = {};
  p.eta = 0.0;
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(Bandit, GreedyArgmax) {
  Bandit b(3, 1.0, 0.0);
  b.update(0, 0.1);
  b.update(1, 0.5);
  b.update(2, 0.2);
  Rng rng(1);
  EXPECT_EQ(b.select(rng), 1);
  EXPECT_DOUBLE_EQ(b.max_abs_value(), 0.5);
}

TEST(Bandit, TiesAndFullExplorationAreUniform) {
  Rng rng(2);
  Bandit ties(4, 0.1, 0.0);
  expect_frequencies([&] { return ties.select(rng); }, {0.25, 0.25, 0.25, 0.25},
                     10000);
  Bandit explore(4, 1.0, 1.0);
  explore.update(2, 1.0);
  expect_frequencies([&] { return explore.select(rng); }, {0.25, 0.25, 0.25, 0.25},
                     10000);
  // Greedy override ignores epsilon.
  for (int i = 0; i < 100; ++i) EXPECT_EQ(explore.select(rng, true), 2);
}

TEST(Bandit, MovingAverage) {
  Bandit b(2, 0.1, 0.1);
  b.update(0, 1.0);
  EXPECT_DOUBLE_EQ(b.value(0), 0.1);
  for (int i = 0; i < 200; ++i) b.update(0, 0.0);
  EXPECT_LT(std::abs(b.value(0)), 1e-9);
  const double before = b.value(0);
  b.update(0, -1.0);
  EXPECT_LT(b.value(0), before);
  EXPECT_THROW(b.update(2, 0.0), InvalidGoal);
}

TEST(Bandit, ArgmaxInvariantToRewardScale) {
  Bandit a(5, 0.1, 0.0);
  Bandit b(5, 0.1, 0.0);
  Rng draws(3);
  Rng ra(4);
  Rng rb(4);
  for (int i = 0; i < 300; ++i) {
    const GoalId g = uniform_index(draws, 5);
    const double r = uniform01(draws) * 2 - 1;
    a.update(g, r);
    b.update(g, 7.5 * r);
    EXPECT_EQ(a.select(ra), b.select(rb));
  }
}

TEST(GoalQTable, SelectionContracts) {
  Rng rng(5);
  GoalQTable q(3, 0.1, 0.9, 0.0);
  expect_frequencies([&] { return q.select(Context(0b101), rng); },
                     {1.0 / 3, 1.0 / 3, 1.0 / 3}, 9000);
  // Drive a row to [0, 0.9, 0.3] with terminal updates at alpha = 1.
  GoalQTable set(3, 1.0, 0.9, 0.0);
  set.update(Context(), 1, 0.9, Context(), true);
  set.update(Context(), 2, 0.3, Context(), true);
  EXPECT_EQ(set.row(Context()), (std::vector<double>{0.0, 0.9, 0.3}));
  EXPECT_EQ(set.select(Context(), rng), 1);
  GoalQTable explore(3, 1.0, 0.9, 1.0);
  explore.update(Context(), 1, 0.9, Context(), true);
  expect_frequencies([&] { return explore.select(Context(), rng); },
                     {1.0 / 3, 1.0 / 3, 1.0 / 3}, 9000);
}

TEST(GoalQTable, UpdateRule) {
  GoalQTable q(3, 0.1, 0.9, 0.1);
  q.update(Context(1), 0, 1.0, Context(3), true);
  EXPECT_DOUBLE_EQ(q.value(Context(1), 0), 0.1);
  EXPECT_EQ(q.visited_contexts(), 1u);
  // Bootstrap from the next row.
  q.update(Context(0), 0, 0.0, Context(1), false);
  EXPECT_DOUBLE_EQ(q.value(Context(0), 0), 0.1 * 0.9 * 0.1);
  EXPECT_EQ(q.visited_contexts(), 2u);
  EXPECT_THROW(q.update(Context(), 3, 0.0, Context(), true), InvalidGoal);

  GoalQTable zero(3, 0.1, 0.9, 0.1);
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    zero.update(Context(uniform_index(rng, 8)), uniform_index(rng, 3), 0.0,
                Context(uniform_index(rng, 8)), bernoulli(rng, 0.2));
  }
  for (const auto& [ctx, row] : zero.rows()) {
    for (double v : row) EXPECT_EQ(v, 0.0);
  }
}

TEST(GoalQTable, ChainMatchesValueIteration) {
  const auto rep = checks::check_goal_table_chain();
  EXPECT_LE(rep.max_error, 1e-6);
  EXPECT_NEAR(rep.oracle_empty_goal0, 0.81, 1e-12);
  EXPECT_NEAR(rep.q_empty_goal0, 0.81, 1e-6);
}

TEST(MgrailReward, BurstPropagatesOneStepBack) {
  CompetenceTracker t(3);
  for (int i = 0; i < 10; ++i) t.record_attempt(1, false);
  for (int i = 0; i < 10; ++i) t.record_attempt(1, true);
  const double r = mgrail_trial_reward(t, 1);
  EXPECT_EQ(r, 1.0);
  GoalQTable q(3, 0.1, 0.9, 0.1);
  // Goal 1 chosen in context {0}; then goal 0 chosen from the empty context.
  q.update(Context(0b1), 1, r, Context(0b11), false);
  q.update(Context(), 0, 0.0, Context(0b1), false);
  EXPECT_DOUBLE_EQ(q.value(Context(0b1), 1), 0.1);
  EXPECT_DOUBLE_EQ(q.value(Context(), 0), 0.1 * 0.9 * 0.1);

  // A negative reward lowers a stale row.
  const double before = q.value(Context(0b1), 1);
  q.update(Context(0b1), 1, -1.0, Context(0b11), false);
  EXPECT_LT(q.value(Context(0b1), 1), before);
}

TEST(HierarchicalSelector, EmptyTablesSelectUniformly) {
  HierarchicalSelector h(3, SelectorParams{});
  Rng rng(7);
  expect_frequencies([&] { return h.select(Context(), rng).first; },
                     {1.0 / 3, 1.0 / 3, 1.0 / 3}, 9000);
  expect_frequencies([&] { return h.select(Context(), rng).second; },
                     {1.0 / 3, 1.0 / 3, 1.0 / 3}, 9000);
}

TEST(HierarchicalSelector, TargetHeldUnlessRedrawn) {
  HierarchicalSelector h(6, SelectorParams{});
  Rng rng(8);
  const GoalId t = h.select(Context(), rng).first;
  for (int i = 0; i < 50; ++i) EXPECT_EQ(h.select(Context(), rng, false).first, t);
  EXPECT_EQ(h.current_target(), t);
}

TEST(HierarchicalSelector, UpdateSemantics) {
  SelectorParams p;
  HierarchicalSelector h(3, p);
  CompetenceTracker tracker(3);

  // Not achieved, epoch continues: r = 0, bootstrap from ctx_next.
  double dc = h.update(2, 0, Context(), Context(0b1), false, tracker);
  EXPECT_EQ(dc, 0.0);
  EXPECT_EQ(tracker.history(2), (std::deque<bool>{false}));
  EXPECT_EQ(h.subgoal_table(2).value(Context(), 0), 0.0);

  // Achieved: terminal backup with r = 1 even though ctx_next has no row.
  dc = h.update(2, 2, Context(0b11), Context(0b111), false, tracker);
  EXPECT_DOUBLE_EQ(h.subgoal_table(2).value(Context(0b11), 2), 0.1);
  EXPECT_EQ(tracker.history(2), (std::deque<bool>{false, true}));
  EXPECT_DOUBLE_EQ(dc, 1.0);  // [f] -> [t]
  EXPECT_DOUBLE_EQ(h.target_bandit().value(2), 0.1);

  // The bootstrap now sees the learned row.
  h.update(2, 1, Context(0b1), Context(0b11), false, tracker);
  EXPECT_DOUBLE_EQ(h.subgoal_table(2).value(Context(0b1), 1), 0.1 * 0.9 * 0.1);

  // Epoch end makes the backup terminal.
  HierarchicalSelector e(3, p);
  CompetenceTracker t2(3);
  e.update(2, 2, Context(0b11), Context(0b111), false, t2);
  e.update(2, 1, Context(0b1), Context(0b11), true, t2);
  EXPECT_EQ(e.subgoal_table(2).value(Context(0b1), 1), 0.0);
}

TEST(HierarchicalSelector, LitTargetIsNotAnAttempt) {
  HierarchicalSelector h(3, SelectorParams{});
  CompetenceTracker tracker(3);
  const double dc = h.update(0, 1, Context(0b1), Context(0b11), false, tracker);
  EXPECT_EQ(dc, 0.0);
  EXPECT_TRUE(tracker.history(0).empty());
}

TEST(HierarchicalSelector, PlateauDecaysBanditButKeepsCurriculum) {
  // Chain 0 -> 1 -> 2 under perfect skills, target always 2. Once the
  // curriculum is greedy the outcomes cycle f, f, t, so every half-window of
  // three holds one success and the progress signal is exactly zero.
  SelectorParams p;
  p.epsilon = 0.0;
  HierarchicalSelector h(3, p);
  CompetenceTracker tracker(3, 6);
  for (int epoch = 0; epoch < 400; ++epoch) {
    Context ctx;
    Rng rng(static_cast<std::uint64_t>(epoch));
    for (int t = 0; t < 8; ++t) {
      const GoalId sub = h.select_subgoal(2, ctx, rng);
      Context next = ctx;
      const std::uint64_t need = sub == 0 ? 0 : (std::uint64_t{1} << (sub - 1));
      if (ctx.contains_all(need)) next.set(sub);
      h.update(2, sub, ctx, next, t == 7, tracker);
      ctx = next;
      if (ctx.test(2)) break;
    }
  }
  EXPECT_LT(h.target_bandit().max_abs_value(), 0.05);
  Rng rng(99);
  Context ctx;
  for (int step = 0; step < 3 && !ctx.test(2); ++step) {
    const GoalId sub = h.select_subgoal(2, ctx, rng, true);
    EXPECT_EQ(sub, step);
    ctx.set(sub);
  }
  EXPECT_TRUE(ctx.test(2));
}
