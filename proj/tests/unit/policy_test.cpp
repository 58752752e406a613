#include <gtest/gtest.h>

#include <map>

#include "oracles.hpp"
#include "vlasteer/error.hpp"
#include "vlasteer/policy.hpp"

namespace vlasteer {
namespace {

using namespace vlasteer::oracle;

PolicyConfig zero_defect() {
  PolicyConfig c;
  c.p_wrong = 0;
  c.p_noise = 0;
  c.p_plan_err = 0;
  return c;
}

TaskSpec tiny_task() {
  TaskSpec t;
  t.instruction = "put both the alphabet soup and the tomato sauce in the basket";
  t.subgoals = {{Predicate::In, "soup", "basket"}, {Predicate::In, "sauce", "basket"}};
  return t;
}

TEST(Policy, EffectiveRatesScaleAndClamp) {
  PolicyConfig c;
  c.p_wrong = 0.2;
  c.p_noise = 0.05;
  c.t_act = 2.0;
  const auto id = effective_rates(c, SuiteTag::id);
  EXPECT_DOUBLE_EQ(id.wrong, 0.4);
  EXPECT_DOUBLE_EQ(id.noise, 0.1);
  c.p_wrong = 0.9;
  EXPECT_DOUBLE_EQ(effective_rates(c, SuiteTag::compose).wrong, 1.0);
  c.t_act = 0.0;
  EXPECT_DOUBLE_EQ(effective_rates(c, SuiteTag::compose).wrong, 0.0);
}

TEST(Policy, DefaultCorruptionRanksViewpointHardest) {
  const auto f = default_corruption();
  auto load = [&](SuiteTag s) { return f.at(s).wrong * f.at(s).noise; };
  for (SuiteTag s : {SuiteTag::lang_rephrase, SuiteTag::lang_object_property, SuiteTag::visual_scene})
    EXPECT_GT(load(SuiteTag::visual_viewpoint), load(s)) << to_string(s);
  EXPECT_EQ(f.at(SuiteTag::id), CorruptionFactors{});
}

TEST(Policy, ValidateRejectsOutOfRange) {
  PolicyConfig c;
  c.p_wrong = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = PolicyConfig{};
  c.h_max = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = PolicyConfig{};
  c.corruption[SuiteTag::id].noise = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_NO_THROW(PolicyConfig{}.validate());
}

TEST(PlanRecord, RenderIsByteExact) {
  PlanRecord r;
  r.plans = {"put the alphabet soup in the basket", "put the tomato sauce in the basket"};
  r.now = r.plans[0];
  EXPECT_EQ(r.render(),
            "Plans: put the alphabet soup in the basket; put the tomato sauce in the basket\n"
            "What has been done: nothing\n"
            "Now I need to do: put the alphabet soup in the basket");
  r.done = {r.plans[0]};
  r.now = r.plans[1];
  r.target = {Predicate::In, "sauce", "basket"};
  const PlanRecord back = parse_plan_record(r.render());
  EXPECT_EQ(back.plans, r.plans);
  EXPECT_EQ(back.done, r.done);
  EXPECT_EQ(back.now, r.now);
  EXPECT_EQ(back.target, r.target);
}

TEST(PlanRecord, TemplateRejectsReorderedOrMissingFields) {
  const std::string ok = "Plans: close the drawer\nWhat has been done: nothing\nNow I need to do: close the drawer";
  EXPECT_TRUE(matches_plan_template(ok));
  EXPECT_FALSE(matches_plan_template(
      "What has been done: nothing\nPlans: close the drawer\nNow I need to do: close the drawer"));
  EXPECT_FALSE(matches_plan_template("Plans: close the drawer\nNow I need to do: close the drawer"));
  EXPECT_FALSE(matches_plan_template(ok + "\n"));
  EXPECT_THROW(parse_plan_record("Plans: x"), ParseError);
}

TEST(GeneratePlan, ZeroDefectFollowsFirstUnmet) {
  const TaskSpec task = tiny_task();
  WorldState s = tiny_state();
  Rng rng(1);
  auto p0 = generate_plan(s, nullptr, task, zero_defect(), rng);
  ASSERT_TRUE(p0);
  EXPECT_EQ(p0->index, 0);
  EXPECT_TRUE(p0->done.empty());
  EXPECT_EQ(p0->target, task.subgoals[0]);
  EXPECT_EQ(p0->now, plan_sentence(task.subgoals[0]));

  s.objects[0].container = 0;
  s.objects[0].pos = s.fixtures[0].pos;
  auto p1 = generate_plan(s, &*p0, task, zero_defect(), rng);
  ASSERT_TRUE(p1);
  EXPECT_EQ(p1->index, 1);
  EXPECT_EQ(p1->done, std::vector<std::string>{plan_sentence(task.subgoals[0])});
  EXPECT_EQ(p1->target, task.subgoals[1]);

  s.objects[1].container = 0;
  s.objects[1].pos = s.fixtures[0].pos;
  EXPECT_FALSE(generate_plan(s, &*p1, task, zero_defect(), rng));
}

TEST(GeneratePlan, PlanErrorReplacesPendingEntry) {
  PolicyConfig c = zero_defect();
  c.p_plan_err = 1.0;
  Rng rng(4);
  const auto p = generate_plan(tiny_state(), nullptr, tiny_task(), c, rng);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->target, (Subgoal{Predicate::In, "sauce", "basket"}));
  EXPECT_EQ(p->plans[0], p->now);
  EXPECT_TRUE(matches_plan_template(p->render()));
}

TEST(OpenSegment, WrongSubgoalIsUniformOverAlternatives) {
  const Scene sc = sample_scene(SuiteTag::compose, 0, 5);
  PlanRecord plan;
  plan.target = sc.task.subgoals[0];
  const auto alts = alternative_subgoals(sc.state, plan.target);
  ASSERT_GE(alts.size(), 3u);
  PolicyConfig c = zero_defect();
  c.p_wrong = 1.0;
  c.corruption.clear();
  std::map<Subgoal, int> hits;
  const int n = 30000;
  Rng rng(9);
  for (int i = 0; i < n; ++i) hits[open_segment(plan, sc.state, SuiteTag::id, c, rng).intended]++;
  EXPECT_EQ(hits.size(), alts.size());
  const double p = 1.0 / static_cast<double>(alts.size());
  const double sd = std::sqrt(n * p * (1 - p));
  for (const auto& a : alts) EXPECT_NEAR(hits[a], n * p, 3 * sd) << to_string(a);
}

TEST(OpenSegment, SegmentLawMatchesWrongRate) {
  PolicyConfig c = zero_defect();
  c.p_wrong = 0.3;
  Rng rng(17);
  long aligned = 0;
  const long n = 20000;
  for (long i = 0; i < n; ++i) {
    const Scene sc = sample_scene(SuiteTag::id, static_cast<int>(i % 2), static_cast<std::uint64_t>(i));
    PlanRecord plan;
    plan.target = sc.task.subgoals[0];
    aligned += open_segment(plan, sc.state, SuiteTag::id, c, rng).intended == plan.target;
  }
  EXPECT_TRUE(in_wilson99(aligned, n, 0.7)) << aligned;
}

TEST(NextToken, ZeroDefectTracksExpertAndStopsOnSuccess) {
  WorldState s = tiny_state();
  const Subgoal g{Predicate::In, "soup", "basket"};
  SegmentState seg{g, 0};
  Rng rng(3);
  PolicyConfig c = zero_defect();
  int n = 0;
  for (Action a = next_token(s, seg, SuiteTag::id, c, rng); a != Action::Think;
       a = next_token(s, seg, SuiteTag::id, c, rng)) {
    EXPECT_EQ(a, expert_action(s, g));
    s = step(s, a);
    ++n;
  }
  EXPECT_TRUE(eval_predicate(s, g));
  EXPECT_EQ(n, bfs_distance(tiny_state(), g));
  EXPECT_EQ(seg.steps_taken, n);
}

TEST(NextToken, CapForcesThinkWithoutDrawing) {
  PolicyConfig c = zero_defect();
  c.h_max = 2;
  SegmentState seg{{Predicate::In, "soup", "basket"}, 2};
  Rng a(11), b(11);
  EXPECT_EQ(next_token(tiny_state(), seg, SuiteTag::id, c, a), Action::Think);
  EXPECT_EQ(a.next(), b.next());
}

TEST(NextToken, SatisfiedIntentThinksFirst) {
  WorldState s = tiny_state();
  s.fixtures[3].open = false;
  SegmentState seg{{Predicate::Closed, "", "drawer"}, 0};
  Rng rng(0);
  EXPECT_EQ(next_token(s, seg, SuiteTag::id, zero_defect(), rng), Action::Think);
}

TEST(Vanilla, ZeroDefectSolvesTask) {
  const Scene sc = sample_scene(SuiteTag::id, 3, 21);
  WorldState s = sc.state;
  VanillaState vs;
  Rng rng(2);
  for (int i = 0; i < 400; ++i) {
    const Action a = vanilla_action(s, sc.task, zero_defect(), vs, rng);
    if (a == Action::Think) break;
    s = step(s, a);
  }
  EXPECT_TRUE(all_satisfied(s, sc.task.subgoals));
  EXPECT_EQ(vs.groundings, static_cast<int>(sc.task.subgoals.size()));
}

}  // namespace
}  // namespace vlasteer
