#include <gtest/gtest.h>

#include <cmath>

#include "checks.hpp"
#include "grail/errors.hpp"
#include "grail/skills.hpp"

using namespace grail;

namespace {

WorldConfig six_buttons() {
  WorldConfig w;
  w.button_cells = {{1, 1}, {3, 1}, {5, 1}, {7, 1}, {1, 7}, {5, 7}};
  return w;
}

GraphSchedule exp1_schedule() {
  return GraphSchedule(DependencyGraph(6, {{2, {0, 1}}, {3, {2}}, {5, {4}}}));
}

}  // namespace

TEST(ReachProbability, ClosedForm) {
  EXPECT_NEAR(reach_probability(0.02, 30, 0), 0.02, 1e-15);
  EXPECT_NEAR(reach_probability(0.02, 30, 1e6), 1.0, 1e-12);
  EXPECT_NEAR(reach_probability(0.02, 30, 30), 1 - 0.98 * std::exp(-1.0), 1e-15);
  double prev = 0.0;
  for (int m = 0; m < 300; ++m) {
    const double p = reach_probability(0.02, 30, m);
    EXPECT_GT(p, prev);
    EXPECT_GE(p, 0.02);
    EXPECT_LT(p, 1.0);
    prev = p;
  }
}

TEST(SkillParams, Validation) {
  SkillParams p;
  EXPECT_NO_THROW(p.validate());
  p.tau = 0;
  EXPECT_THROW(p.validate(), ValidationError);
  p = {};
  p.p0 = 1.0;
  EXPECT_THROW(p.validate(), ValidationError);
  p = {};
  p.epsilon_decay = 0.0;
  EXPECT_THROW(p.validate(), ValidationError);
  EXPECT_EQ(parse_skill_backend("grid"), SkillBackend::kGridLearner);
  EXPECT_EQ(parse_skill_backend("scripted"), SkillBackend::kScripted);
  EXPECT_THROW(parse_skill_backend("neural"), ValidationError);
  EXPECT_EQ(parse_skill_variant("context_conditioned"),
            SkillVariant::kContextConditioned);
  EXPECT_THROW(parse_skill_variant("both"), ValidationError);
}

TEST(ScriptedSkills, ContextFreeCountsOnePressPerTrial) {
  ButtonWorld w(six_buttons(), exp1_schedule());
  ScriptedSkills s(6, SkillVariant::kContextFree, 0.02, 30);
  Rng rng(1);
  w.reset_epoch(0);
  const auto fp = s.fingerprint();
  SkillTrace tr = s.execute(w, 0, rng, true);
  EXPECT_EQ(s.fingerprint(), fp);  // execute does not learn
  EXPECT_EQ(tr.presses, (std::vector<GoalId>{0}));
  s.update(0, tr);
  EXPECT_EQ(s.practice(0, 0), 1);
  EXPECT_EQ(s.practice(1, 1), 0);
  EXPECT_NEAR(s.press_probability(0, 0), reach_probability(0.02, 30, 1), 1e-15);
}

TEST(ScriptedSkills, ContextFreeGatedTargetNeverSucceeds) {
  ButtonWorld w(six_buttons(), exp1_schedule());
  ScriptedSkills s(6, SkillVariant::kContextFree, 0.9, 1);
  Rng rng(1);
  for (int e = 0; e < 50; ++e) {
    w.reset_epoch(e);
    SkillTrace tr = s.execute(w, 2, rng, true);
    EXPECT_FALSE(tr.outcome.achieved);
    s.update(2, tr);
  }
}

TEST(ScriptedSkills, ConditionedCountsFollowAttemptedPresses) {
  ButtonWorld w(six_buttons(), exp1_schedule());
  ScriptedSkills s(6, SkillVariant::kContextConditioned, 0.5, 1e9);
  Rng rng(2);
  // Find a trial on cyan that pressed red, green and then failed.
  for (int e = 0; e < 1000; ++e) {
    w.reset_epoch(e);
    SkillTrace tr = s.execute(w, 3, rng, true);
    if (tr.presses == std::vector<GoalId>{0, 1} && !tr.outcome.achieved) {
      EXPECT_EQ(tr.outcome.steps_used, w.config().trial_timeout);
      s.update(3, tr);
      EXPECT_EQ(s.practice(3, 0), 1);
      EXPECT_EQ(s.practice(3, 1), 1);
      EXPECT_EQ(s.practice(3, 2), 0);
      EXPECT_EQ(s.practice(3, 3), 0);
      return;
    }
  }
  FAIL() << "no matching trial found";
}

TEST(ScriptedSkills, ConditionedSkipsLitAncestors) {
  ButtonWorld w(six_buttons(), exp1_schedule());
  ScriptedSkills s(6, SkillVariant::kContextConditioned, 0.999, 1);
  Rng rng(3);
  w.reset_epoch(0);
  w.press(0);
  w.press(1);
  w.begin_trial(0);
  w.end_trial();
  SkillTrace tr = s.execute(w, 3, rng, true);
  EXPECT_EQ(tr.presses, (std::vector<GoalId>{2, 3}));
}

TEST(ScriptedSkills, ConditionedSuccessIsProductOfPressProbabilities) {
  ScriptedSkills s(6, SkillVariant::kContextConditioned, 0.5, 30);
  SkillTrace fake;
  fake.presses = {0, 1};
  for (int i = 0; i < 10; ++i) s.update(3, fake);
  fake.presses = {0};
  for (int i = 0; i < 20; ++i) s.update(3, fake);
  ASSERT_EQ(s.practice(3, 0), 30);
  ASSERT_EQ(s.practice(3, 1), 10);

  double expected = 1.0;
  for (GoalId h : {0, 1, 2, 3}) expected *= reach_probability(0.5, 30, s.practice(3, h));

  ButtonWorld w(six_buttons(), exp1_schedule());
  Rng rng(4);
  const int trials = 20000;
  int hits = 0;
  for (int i = 0; i < trials; ++i) {
    w.reset_epoch(0);
    hits += s.execute(w, 3, rng, true).outcome.achieved ? 1 : 0;
  }
  const double sigma = std::sqrt(expected * (1 - expected) / trials);
  EXPECT_NEAR(static_cast<double>(hits) / trials, expected, 3 * sigma);
}

TEST(ScriptedSkills, ChainIsSlowerThanSinglePressAtEqualPractice) {
  for (int m : {0, 5, 30, 100}) {
    const double single = reach_probability(0.02, 30, m);
    double chain = 1.0;
    for (int i = 0; i < 4; ++i) chain *= reach_probability(0.02, 30, m);
    EXPECT_LT(chain, single);
  }
}

TEST(GridSkills, CorridorMatchesValueIteration) {
  const auto rep = checks::check_grid_skill({5, 1, {{4, 0}}, {0u}, 0});
  EXPECT_LE(rep.max_error, 1e-6);
  EXPECT_NEAR(rep.q_home, std::pow(0.95, 4), 1e-6);
}

TEST(GridSkills, AllOracleCases) {
  for (const auto& c : checks::grid_oracle_cases()) {
    const auto rep = checks::check_grid_skill(c);
    EXPECT_LE(rep.max_error, 1e-6) << c.w << "x" << c.h << " target " << c.target;
    EXPECT_GT(rep.states_compared, 0u);
  }
}

TEST(GridSkills, GreedyCorridorPathAfterTraining) {
  WorldConfig cfg;
  cfg.grid_w = 5;
  cfg.grid_h = 1;
  cfg.button_cells = {{4, 0}};
  ButtonWorld w(cfg, GraphSchedule(DependencyGraph(1)));
  SkillParams p;
  p.backend = SkillBackend::kGridLearner;
  GridSkills s(1, SkillVariant::kContextFree, p);
  Rng rng(5);
  for (int e = 0; e < 500; ++e) {
    w.reset_epoch(e);
    SkillTrace tr = s.execute(w, 0, rng, true);
    s.update(0, tr);
  }
  EXPECT_LT(s.epsilon(0), 0.3);
  w.reset_epoch(0);
  const auto fp = s.fingerprint();
  SkillTrace tr = s.execute(w, 0, rng, false);
  EXPECT_EQ(s.fingerprint(), fp);
  EXPECT_TRUE(tr.outcome.achieved);
  EXPECT_EQ(tr.outcome.steps_used, 5);
  ASSERT_EQ(tr.transitions.size(), 5u);
  EXPECT_TRUE(tr.transitions.back().terminal);
  EXPECT_EQ(tr.transitions.back().reward, 1.0);
}

TEST(GridSkills, ConditionedStateSeesOnlyAncestorBits) {
  ButtonWorld w(six_buttons(), exp1_schedule());
  SkillParams p;
  p.backend = SkillBackend::kGridLearner;
  GridSkills cond(6, SkillVariant::kContextConditioned, p);
  GridSkills free(6, SkillVariant::kContextFree, p);
  w.reset_epoch(0);
  w.press(0);
  w.press(4);
  EXPECT_EQ(cond.observe(w, 3).ctx_bits, 0b1u);  // red is an ancestor, yellow not
  EXPECT_EQ(free.observe(w, 3).ctx_bits, 0u);
  EXPECT_EQ(cond.observe(w, 3).cell, 7 * 10 + 1);
}

TEST(MakeSkillSet, Backends) {
  SkillParams p;
  auto s = make_skill_set(3, SkillVariant::kContextFree, p);
  EXPECT_EQ(s->backend(), SkillBackend::kScripted);
  p.backend = SkillBackend::kGridLearner;
  auto g = make_skill_set(3, SkillVariant::kContextConditioned, p);
  EXPECT_EQ(g->backend(), SkillBackend::kGridLearner);
  EXPECT_EQ(g->variant(), SkillVariant::kContextConditioned);
  auto c = g->clone();
  EXPECT_EQ(c->fingerprint(), g->fingerprint());
  p.alpha = 0;
  EXPECT_THROW(make_skill_set(3, SkillVariant::kContextFree, p), ValidationError);
}
