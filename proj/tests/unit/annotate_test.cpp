#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "vlasteer/annotate.hpp"
#include "vlasteer/error.hpp"

namespace vlasteer {
namespace {

using namespace vlasteer::oracle;

AnnotatedDemo demo(SuiteTag suite, int task, std::uint64_t seed) {
  Trajectory t = generate_demo(sample_scene(suite, task, seed), seed);
  auto segs = segment_trajectory(t);
  return {std::move(t), std::move(segs)};
}

TEST(GenerateDemo, BasketTaskCompletesAndIsDeterministic) {
  const Scene sc = sample_scene(SuiteTag::id, 0, 4);
  const Trajectory t = generate_demo(sc, 4);
  ASSERT_EQ(sc.task.subgoals.size(), 2u);
  for (const auto& g : sc.task.subgoals) EXPECT_TRUE(eval_predicate(t.frames.back().state, g));
  EXPECT_EQ(t.frames.back().action, Action::Think);
  for (std::size_t i = 0; i + 1 < t.frames.size(); ++i)
    EXPECT_EQ(t.frames[i + 1].state, step(t.frames[i].state, t.frames[i].action));
  EXPECT_EQ(t, generate_demo(sc, 4));
}

TEST(GenerateDemo, LengthIsBfsOptimalPerSubgoal) {
  for (int task = 0; task < suite_size(SuiteTag::id); ++task) {
    const auto [t, segs] = demo(SuiteTag::id, task, 30 + static_cast<std::uint64_t>(task));
    for (const auto& seg : segs) {
      const int len = (seg.end == static_cast<int>(t.frames.size()) ? seg.end - 1 : seg.end) - seg.start;
      EXPECT_EQ(len, bfs_distance(t.frames[static_cast<std::size_t>(seg.start)].state, seg.plan.target, 30))
          << task << " " << seg.plan.now;
    }
  }
}

TEST(Segment, SingleSubgoalSpansTrajectory) {
  Scene sc;
  sc.state = tiny_state();
  sc.task.instruction = "put the alphabet soup in the basket";
  sc.task.subgoals = {{Predicate::In, "soup", "basket"}};
  const Trajectory t = generate_demo(sc, 0);
  const auto segs = segment_trajectory(t);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].start, 0);
  EXPECT_EQ(segs[0].end, static_cast<int>(t.frames.size()));
  EXPECT_EQ(segs[0].text, "Plans: put the alphabet soup in the basket\nWhat has been done: nothing\n"
                          "Now I need to do: put the alphabet soup in the basket");
}

TEST(Segment, BoundaryIsFirstFrameWithSubgoal) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto [t, segs] = demo(SuiteTag::id, static_cast<int>(seed % 10), seed);
    int first = -1;
    for (std::size_t i = 0; i < t.frames.size(); ++i)
      if (eval_predicate(t.frames[i].state, t.task.subgoals[0])) {
        first = static_cast<int>(i);
        break;
      }
    if (segs.size() > 1) EXPECT_EQ(segs[0].end, first);
    EXPECT_EQ(segment_trajectory(t), segs);
    for (std::size_t j = 0; j < segs.size(); ++j) {
      EXPECT_EQ(segs[j].plan.done.size(), j);
      EXPECT_EQ(segs[j].plan.target, t.task.subgoals[j]);
    }
  }
}

TEST(Segment, CountVariesWithTask) {
  std::set<std::size_t> counts;
  for (int task = 0; task < 10; ++task) counts.insert(demo(SuiteTag::id, task, 1).second.size());
  EXPECT_GT(counts.size(), 1u);
}

TEST(Segment, NeverCompletedSubgoalIsAnError) {
  Trajectory t;
  t.task.subgoals = {{Predicate::In, "soup", "basket"}};
  t.frames = {{tiny_state(), Action::Think}};
  EXPECT_THROW(segment_trajectory(t), PlanningError);
}

TEST(Validate, PipelineOutputIsClean) {
  std::vector<AnnotatedDemo> data;
  for (int i = 0; i < 100; ++i) data.push_back(demo(static_cast<SuiteTag>(i % 6), i % 10, static_cast<std::uint64_t>(i)));
  const auto rep = validate_annotations(data);
  EXPECT_TRUE(rep.ok()) << rep.violations.front();
  EXPECT_EQ(rep.trajectories, 100);
  EXPECT_EQ(rep.passed, rep.segments);
}

TEST(Validate, ShiftedEndIsFlagged) {
  auto d = demo(SuiteTag::id, 0, 2);
  ASSERT_GE(d.second.size(), 2u);
  d.second[0].end -= 1;
  d.second[1].start -= 1;
  const auto rep = validate_annotations({d});
  EXPECT_EQ(rep.failed, 1);
  ASSERT_FALSE(rep.ok());
  EXPECT_NE(rep.violations[0].find("terminal"), std::string::npos);
}

TEST(Validate, ReorderedFieldsAreFlagged) {
  auto d = demo(SuiteTag::id, 0, 2);
  std::string& text = d.second[0].text;
  const auto l1 = text.find('\n');
  const auto l2 = text.find('\n', l1 + 1);
  text = text.substr(l1 + 1, l2 - l1 - 1) + "\n" + text.substr(0, l1) + text.substr(l2);
  const auto rep = validate_annotations({d});
  ASSERT_FALSE(rep.ok());
  EXPECT_NE(rep.violations[0].find("template"), std::string::npos);
}

TEST(Validate, GapIsFlagged) {
  auto d = demo(SuiteTag::id, 0, 2);
  d.second.pop_back();
  EXPECT_FALSE(validate_annotations({d}).ok());
}

TEST(Dataset, JsonlHasDocumentedKeys) {
  std::vector<AnnotatedDemo> data = {demo(SuiteTag::id, 0, 1), demo(SuiteTag::compose, 3, 2)};
  std::ostringstream out;
  write_dataset_jsonl(out, data);
  std::istringstream in(out.str());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("task") && j.contains("frames") && j.contains("segments"));
    EXPECT_EQ(j["frames"].size(), data[static_cast<std::size_t>(n)].first.frames.size());
    EXPECT_EQ(j["segments"][0]["reasoning"], data[static_cast<std::size_t>(n)].second[0].text);
    ++n;
  }
  EXPECT_EQ(n, 2);
}

}  // namespace
}  // namespace vlasteer
