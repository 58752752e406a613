#include <gtest/gtest.h>

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <unordered_set>

#include "vlasteer/error.hpp"
#include "vlasteer/taskworld.hpp"
#include "oracles.hpp"

namespace vlasteer {
namespace {

using namespace vlasteer::oracle;

// Independent transition table: each action lists a precondition on the
// co-located entities and an effect. Written without reusing step().
WorldState table_step(WorldState s, Action a) {
  s.tick++;
  Cell& p = s.gripper.pos;
  const Fixture* here = nullptr;
  for (auto& f : s.fixtures)
    if (f.pos == p) here = &f;
  const int dx[] = {0, 0, 1, -1};
  const int dy[] = {-1, 1, 0, 0};
  const int ai = static_cast<int>(a);
  if (ai <= 3) {
    int nx = p.x + dx[ai], ny = p.y + dy[ai];
    if (nx >= 0 && ny >= 0 && nx < s.grid_width && ny < s.grid_height) p = {nx, ny};
    if (s.gripper.held) s.objects[*s.gripper.held].pos = p;
    return s;
  }
  if (a == Action::Grasp && !s.gripper.held) {
    for (auto& o : s.objects) {
      if (o.pos != p) continue;
      bool locked = o.container && s.fixtures[*o.container].open.has_value() &&
                    !*s.fixtures[*o.container].open;
      if (locked) continue;
      o.container = std::nullopt;
      s.gripper.held = o.id;
      break;
    }
  }
  if (a == Action::Release && s.gripper.held) {
    Object& o = s.objects[*s.gripper.held];
    if (here) {
      if (!here->open.has_value() || *here->open) {
        o.container = here->id;
        s.gripper.held.reset();
      }
    } else {
      bool occupied = false;
      for (auto& other : s.objects)
        if (other.id != o.id && other.pos == p && !other.container) occupied = true;
      if (!occupied) s.gripper.held.reset();
    }
  }
  if ((a == Action::Open || a == Action::Close) && here && here->open.has_value())
    s.fixtures[here->id].open = a == Action::Open;
  if (a == Action::Activate && here && here->kind == FixtureKind::stove) s.fixtures[here->id].active = true;
  return s;
}

TEST(Step, BorderClampIsNoOp) {
  WorldState s = tiny_state();
  s.gripper.pos = {0, 0};
  WorldState n = step(s, Action::MoveW);
  WorldState expect = s;
  expect.tick = 1;
  EXPECT_EQ(n, expect);
}

TEST(Step, GraspPicksCoLocatedObject) {
  WorldState s = tiny_state();
  WorldState n = step(s, Action::Grasp);
  ASSERT_TRUE(n.gripper.held.has_value());
  EXPECT_EQ(n.objects[*n.gripper.held].name, "soup");
  EXPECT_EQ(n, table_step(s, Action::Grasp));
}

TEST(Step, ReleaseIntoClosedMicrowaveIsBlocked) {
  WorldState s = tiny_state();
  s.gripper = {{1, 4}, 0};
  s.objects[0].pos = {1, 4};
  WorldState n = step(s, Action::Release);
  WorldState expect = s;
  expect.tick = 1;
  EXPECT_EQ(n, expect);
}

TEST(Step, ThinkIsRejected) { EXPECT_THROW(step(tiny_state(), Action::Think), InvalidArgument); }

TEST(Step, MatchesRuleTableOnRandomWalks) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Scene sc = sample_scene(kAllSuites[seed % kAllSuites.size()], static_cast<int>(seed % 10), seed);
    WorldState s = sc.state;
    Rng rng(seed);
    for (int t = 0; t < 300; ++t) {
      Action a = kMotorActions[rng.index(kMotorActions.size())];
      WorldState n = step(s, a);
      ASSERT_EQ(n, table_step(s, a)) << "seed " << seed << " t " << t << " " << to_string(a);
      ASSERT_TRUE(check_invariants(n).empty()) << check_invariants(n).front();
      ASSERT_EQ(n.objects.size(), s.objects.size());
      ASSERT_LE(manhattan(n.gripper.pos, s.gripper.pos), 1);
      for (std::size_t i = 0; i < s.objects.size(); ++i)
        if (s.gripper.held != s.objects[i].id) ASSERT_EQ(n.objects[i].pos, s.objects[i].pos);
      ASSERT_EQ(step(s, a), n);
      s = n;
    }
  }
}

TEST(Predicate, Basics) {
  WorldState s = tiny_state();
  s.objects[0].pos = {4, 4};
  s.objects[0].container = 0;
  s.gripper.pos = {0, 0};
  EXPECT_TRUE(eval_predicate(s, {Predicate::In, "soup", "basket"}));
  EXPECT_FALSE(eval_predicate(s, {Predicate::Activated, "", "stove"}));
  EXPECT_FALSE(eval_predicate(s, {Predicate::Closed, "", "drawer"}));
  EXPECT_TRUE(eval_predicate(s, {Predicate::Closed, "", "microwave"}));
  EXPECT_THROW(eval_predicate(s, {Predicate::In, "wine", "basket"}), PlanningError);
  EXPECT_THROW(eval_predicate(s, {Predicate::In, "soup", "plate"}), PlanningError);
}

TEST(Grammar, PaperInstructions) {
  using S = std::vector<Subgoal>;
  EXPECT_EQ(compile_instruction("put both the alphabet soup and the tomato sauce in the basket").subgoals,
            (S{{Predicate::In, "soup", "basket"}, {Predicate::In, "sauce", "basket"}}));
  EXPECT_EQ(compile_instruction("turn on the stove and put the moka pot on it").subgoals,
            (S{{Predicate::Activated, "", "stove"}, {Predicate::On, "moka", "stove"}}));
  EXPECT_EQ(compile_instruction("put both the can of soup and can of sauce in the basket").subgoals,
            (S{{Predicate::In, "soup", "basket"}, {Predicate::In, "sauce", "basket"}}));
  EXPECT_EQ(compile_instruction("put the black bowl in the bottom drawer of the cabinet and close it").subgoals,
            (S{{Predicate::In, "bowl", "drawer"}, {Predicate::Closed, "", "drawer"}}));
}

TEST(Grammar, ParseErrorNamesNearestProduction) {
  try {
    compile_instruction("turn on the stove and put the kettle on it");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("turn on the stove and put the <A> on it"), std::string::npos)
        << e.what();
  }
  EXPECT_THROW(compile_instruction("make me a sandwich"), ParseError);
}

std::vector<std::vector<Subgoal>> every_grammar_instance() {
  std::vector<std::vector<Subgoal>> out;
  std::vector<std::string> in_fix, on_fix, openable, stoves;
  for (auto f : fixture_keys()) {
    FixtureKind k = fixture_kind(f);
    if (k == FixtureKind::basket || k == FixtureKind::drawer || k == FixtureKind::microwave) in_fix.emplace_back(f);
    else on_fix.emplace_back(f);
    if (is_openable(k)) openable.emplace_back(f);
    if (k == FixtureKind::stove) stoves.emplace_back(f);
  }
  for (auto a : object_keys()) {
    std::string A(a);
    for (auto& f : in_fix) out.push_back({{Predicate::In, A, f}});
    for (auto& f : on_fix) out.push_back({{Predicate::On, A, f}});
    for (auto& f : openable) out.push_back({{Predicate::In, A, f}, {Predicate::Closed, "", f}});
    for (auto& f : stoves) out.push_back({{Predicate::Activated, "", f}, {Predicate::On, A, f}});
    for (auto b : object_keys()) {
      std::string B(b);
      if (A != B) out.push_back({{Predicate::In, A, "basket"}, {Predicate::In, B, "basket"}});
      for (auto& f1 : on_fix)
        for (auto& f2 : on_fix) out.push_back({{Predicate::On, A, f1}, {Predicate::On, B, f2}});
    }
  }
  return out;
}

TEST(Grammar, ExhaustiveRoundTrip) {
  const auto all = every_grammar_instance();
  EXPECT_GT(all.size(), 3000u);
  for (const auto& goals : all)
    for (Surface surface : {Surface::canonical, Surface::rephrase, Surface::object_property}) {
      const std::string text = render_instruction(goals, surface);
      ASSERT_EQ(compile_instruction(text).subgoals, goals) << text;
    }
}

TEST(Grammar, PlanSentenceRoundTrip) {
  for (const auto& goals : every_grammar_instance())
    for (const auto& g : goals) ASSERT_EQ(parse_plan_sentence(plan_sentence(g)), g);
  EXPECT_THROW(parse_plan_sentence("dance"), ParseError);
}

int expert_length(WorldState s, const Subgoal& goal) {
  int n = 0;
  for (Action a = expert_action(s, goal); a != Action::Think; a = expert_action(s, goal)) {
    s = step(s, a);
    if (++n > 400) return -1;
  }
  return n;
}

TEST(Expert, ExamplesAgainstBfs) {
  WorldState s = tiny_state();
  s.gripper.pos = {1, 2};
  EXPECT_EQ(expert_action(s, {Predicate::In, "soup", "basket"}), Action::MoveE);

  // holding the target over an open drawer
  s.gripper = {{0, 5}, 0};
  s.objects[0].pos = {0, 5};
  EXPECT_EQ(expert_action(s, {Predicate::In, "soup", "drawer"}), Action::Release);

  EXPECT_EQ(expert_action(step(step(tiny_state(), Action::Grasp), Action::MoveE),
                          {Predicate::In, "sauce", "basket"}) != Action::Think,
            true);
}

TEST(Expert, SingleSubgoalPathsAreShortest) {
  const std::vector<Subgoal> goals = {{Predicate::In, "soup", "basket"},
                                      {Predicate::In, "sauce", "microwave"},
                                      {Predicate::Activated, "", "stove"},
                                      {Predicate::Closed, "", "drawer"},
                                      {Predicate::In, "soup", "drawer"}};
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    WorldState s = tiny_state();
    Rng rng(seed);
    s.gripper.pos = {static_cast<int>(rng.index(6)), static_cast<int>(rng.index(4))};
    s.objects[1].pos = {static_cast<int>(rng.index(6)), static_cast<int>(rng.index(3))};
    if (s.objects[1].pos == s.objects[0].pos) s.objects[1].pos = {0, 0};
    for (const auto& g : goals) EXPECT_EQ(expert_length(s, g), bfs_distance(s, g)) << "seed " << seed << " " << to_string(g);
  }
}

TEST(Expert, CompletesEverySuiteSceneForSeeds0To99) {
  for (SuiteTag suite : kAllSuites)
    for (int task = 0; task < suite_size(suite); ++task)
      for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Scene sc = sample_scene(suite, task, seed);
        WorldState s = sc.state;
        const int cap = s.grid_width * s.grid_height * 8;
        int steps = 0;
        while (auto i = first_unmet(s, sc.task.subgoals)) {
          Action a = expert_action(s, sc.task.subgoals[*i]);
          ASSERT_NE(a, Action::Think);
          s = step(s, a);
          ASSERT_LE(++steps, cap) << to_string(suite) << " " << task << " " << seed;
        }
        EXPECT_TRUE(all_satisfied(s, sc.task.subgoals));
      }
}

TEST(Scenes, Deterministic) {
  Scene a = sample_scene(SuiteTag::id, 0, 7);
  Scene b = sample_scene(SuiteTag::id, 0, 7);
  EXPECT_EQ(a.state, b.state);
  EXPECT_EQ(a.task, b.task);
  EXPECT_EQ(snapshot(a.state), snapshot(b.state));
  EXPECT_THROW(sample_scene(SuiteTag::id, 10, 7), InvalidArgument);
  EXPECT_THROW(sample_scene(SuiteTag::compose, -1, 7), InvalidArgument);
}

TEST(Scenes, VisualSceneAddsDistractor) {
  for (int task = 0; task < 10; ++task) {
    Scene id = sample_scene(SuiteTag::id, task, 7);
    Scene vs = sample_scene(SuiteTag::visual_scene, task, 7);
    EXPECT_EQ(vs.task.subgoals, id.task.subgoals);
    EXPECT_GE(vs.state.objects.size(), id.state.objects.size() + 1);
    EXPECT_TRUE(check_invariants(vs.state).empty());
  }
}

TEST(Scenes, LanguageSuitesKeepSceneChangeText) {
  for (int task = 0; task < 10; ++task) {
    Scene id = sample_scene(SuiteTag::id, task, 3);
    for (SuiteTag t : {SuiteTag::lang_rephrase, SuiteTag::lang_object_property}) {
      Scene v = sample_scene(t, task, 3);
      EXPECT_EQ(v.state, id.state);
      EXPECT_EQ(v.task.subgoals, id.task.subgoals);
      EXPECT_NE(v.task.instruction, id.task.instruction);
      EXPECT_EQ(compile_instruction(v.task.instruction).subgoals, v.task.subgoals);
    }
  }
}

TEST(Scenes, ComposePairsAreUnseen) {
  const auto train = training_task_subgoals();
  std::set<std::set<Subgoal>> seen;
  for (const auto& t : train) seen.insert(std::set<Subgoal>(t.begin(), t.end()));
  for (int task = 0; task < suite_size(SuiteTag::compose); ++task) {
    Scene c = sample_scene(SuiteTag::compose, task, 7);
    std::set<Subgoal> s(c.task.subgoals.begin(), c.task.subgoals.end());
    EXPECT_FALSE(seen.count(s)) << c.task.instruction;
  }
}

TEST(Blob, RoundTripAndSensitivity) {
  for (SuiteTag suite : kAllSuites) {
    Scene sc = sample_scene(suite, 3, 11);
    WorldState s = step(step(sc.state, Action::Grasp), Action::MoveE);
    EXPECT_EQ(restore(snapshot(s)), s);
    WorldState moved = s;
    moved.objects.back().pos.x = (moved.objects.back().pos.x + 1) % moved.grid_width;
    EXPECT_NE(state_hash(moved), state_hash(s));
  }
}

TEST(Blob, RejectsMalformed) {
  StateBlob b = snapshot(sample_scene(SuiteTag::id, 0, 7).state);
  EXPECT_THROW(restore(std::span(b.data(), b.size() - 1)), BlobError);
  StateBlob extra = b;
  extra.push_back(0);
  EXPECT_THROW(restore(extra), BlobError);
  StateBlob bad = b;
  bad[0] ^= 1;
  EXPECT_THROW(restore(bad), BlobError);
}

// Reference encoder written from the documented layout.
std::vector<std::uint8_t> reference_encoding(const WorldState& s) {
  std::vector<std::uint8_t> out;
  auto put = [&](std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
  };
  auto name = [&](const std::string& n) {
    put(n.size(), 2);
    out.insert(out.end(), n.begin(), n.end());
  };
  auto flag = [&](const std::optional<bool>& f) { put(f ? (*f ? 1 : 0) : 0xff, 1); };
  put(0x42545356, 4);
  put(1, 2);
  put(s.grid_width, 2);
  put(s.grid_height, 2);
  put(s.tick, 8);
  put(s.gripper.pos.x, 2);
  put(s.gripper.pos.y, 2);
  put(s.gripper.held ? *s.gripper.held : 0xffff, 2);
  put(s.fixtures.size(), 2);
  for (const auto& f : s.fixtures) {
    put(f.id, 2);
    put(static_cast<int>(f.kind), 1);
    put(f.pos.x, 2);
    put(f.pos.y, 2);
    flag(f.open);
    flag(f.active);
    name(f.name);
  }
  put(s.objects.size(), 2);
  for (const auto& o : s.objects) {
    put(o.id, 2);
    put(o.pos.x, 2);
    put(o.pos.y, 2);
    put(o.container ? *o.container : 0xffff, 2);
    name(o.name);
  }
  return out;
}

TEST(Blob, CanonicalEncodingAndGoldenDigest) {
  WorldState s = sample_scene(SuiteTag::id, 0, 7).state;
  EXPECT_EQ(snapshot(s), reference_encoding(s));
  EXPECT_EQ(state_hash(s), 0xd48254d10c9ad656ULL);
}

}  // namespace
}  // namespace vlasteer
