#include "vlasteer/annotate.hpp"

#include <ostream>

#include <json.hpp>

#include "vlasteer/error.hpp"

namespace vlasteer {

Trajectory generate_demo(const Scene& scene, std::uint64_t seed) {
  Trajectory t;
  t.task = scene.task;
  WorldState s = scene.state;
  Rng rng = make_stream(seed, Stream::demo);
  const int cap = s.grid_width * s.grid_height * 8;
  while (auto next = first_unmet(s, scene.task.subgoals)) {
    const Action a = expert_action(s, scene.task.subgoals[*next], &rng);
    t.frames.push_back({s, a});
    s = step(s, a);
    if (static_cast<int>(t.frames.size()) > cap) throw PlanningError("expert did not finish: " + scene.task.instruction);
  }
  t.frames.push_back({s, Action::Think});
  return t;
}

std::vector<AnnotatedSegment> segment_trajectory(const Trajectory& traj) {
  const auto& goals = traj.task.subgoals;
  std::vector<std::string> sentences;
  for (const auto& g : goals) sentences.push_back(plan_sentence(g));

  std::vector<AnnotatedSegment> out;
  int start = 0;
  const int n = static_cast<int>(traj.frames.size());
  for (std::size_t j = 0; j < goals.size(); ++j) {
    int end = start;
    while (end < n && !eval_predicate(traj.frames[static_cast<std::size_t>(end)].state, goals[j])) ++end;
    if (end == n) throw PlanningError("subgoal never completed: " + sentences[j]);
    AnnotatedSegment seg;
    seg.plan.plans = sentences;
    seg.plan.done.assign(sentences.begin(), sentences.begin() + static_cast<std::ptrdiff_t>(j));
    seg.plan.now = sentences[j];
    seg.plan.target = goals[j];
    seg.plan.index = static_cast<int>(j);
    seg.text = seg.plan.render();
    seg.start = start;
    seg.end = end;
    out.push_back(std::move(seg));
    start = end;
  }
  if (!out.empty()) out.back().end = n;
  return out;
}

ValidationReport validate_annotations(const std::vector<AnnotatedDemo>& dataset) {
  ValidationReport rep;
  int demo_index = 0;
  for (const auto& [traj, segs] : dataset) {
    ++rep.trajectories;
    const std::string where = "demo " + std::to_string(demo_index++);
    const int n = static_cast<int>(traj.frames.size());
    int expect_start = 0;
    for (const auto& seg : segs) {
      ++rep.segments;
      const std::size_t before = rep.violations.size();
      const std::string at = where + " segment " + std::to_string(seg.plan.index) + ": ";
      if (seg.start != expect_start) rep.violations.push_back(at + "not contiguous with the previous segment");
      if (seg.end < seg.start || seg.end > n) rep.violations.push_back(at + "bounds outside the trajectory");
      const std::string& text = seg.text;
      if (!matches_plan_template(text)) {
        rep.violations.push_back(at + "plan text does not match the template");
      } else {
        const PlanRecord back = parse_plan_record(text);
        const bool prefix = back.done.size() < back.plans.size() &&
                            std::equal(back.done.begin(), back.done.end(), back.plans.begin());
        if (!prefix || back.now != back.plans[back.done.size()])
          rep.violations.push_back(at + "done is not a prefix of plans or now is not the next plan");
        if (back.plans != seg.plan.plans || back.done != seg.plan.done || back.now != seg.plan.now ||
            back.target != seg.plan.target)
          rep.violations.push_back(at + "text disagrees with the plan record");
      }
      // The segment's last transition must land in a state satisfying `now`.
      if (seg.end > seg.start && seg.end <= n) {
        const WorldState& last = traj.frames[static_cast<std::size_t>(seg.end - 1)].state;
        const bool holds = seg.end == n ? eval_predicate(last, seg.plan.target)
                                        : eval_predicate(traj.frames[static_cast<std::size_t>(seg.end)].state,
                                                         seg.plan.target);
        if (!holds) rep.violations.push_back(at + "terminal state does not satisfy the plan target");
      }
      expect_start = seg.end;
      if (rep.violations.size() == before) ++rep.passed;
      else ++rep.failed;
    }
    if (expect_start != n) rep.violations.push_back(where + ": segments do not cover the trajectory");
  }
  return rep;
}

namespace {

nlohmann::json state_json(const WorldState& s) {
  nlohmann::json objects = nlohmann::json::array();
  for (const auto& o : s.objects) {
    nlohmann::json j = {{"id", o.id}, {"name", o.name}, {"pos", {o.pos.x, o.pos.y}}};
    j["container"] = o.container ? nlohmann::json(*o.container) : nlohmann::json(nullptr);
    objects.push_back(j);
  }
  nlohmann::json fixtures = nlohmann::json::array();
  for (const auto& f : s.fixtures) {
    nlohmann::json j = {{"id", f.id}, {"kind", to_string(f.kind)}, {"name", f.name}, {"pos", {f.pos.x, f.pos.y}}};
    if (f.open) j["open"] = *f.open;
    if (f.active) j["active"] = *f.active;
    fixtures.push_back(j);
  }
  nlohmann::json g = {{"pos", {s.gripper.pos.x, s.gripper.pos.y}}};
  g["held"] = s.gripper.held ? nlohmann::json(*s.gripper.held) : nlohmann::json(nullptr);
  return {{"grid", {s.grid_width, s.grid_height}}, {"tick", s.tick}, {"gripper", g},
          {"objects", objects}, {"fixtures", fixtures}};
}

}  // namespace

void write_dataset_jsonl(std::ostream& out, const std::vector<AnnotatedDemo>& dataset) {
  for (const auto& [traj, segs] : dataset) {
    nlohmann::json subgoals = nlohmann::json::array();
    for (const auto& g : traj.task.subgoals) subgoals.push_back(to_string(g));
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& f : traj.frames) frames.push_back({{"state", state_json(f.state)}, {"action", to_string(f.action)}});
    nlohmann::json segments = nlohmann::json::array();
    for (const auto& s : segs)
      segments.push_back({{"start", s.start}, {"end", s.end}, {"reasoning", s.text}});
    nlohmann::json rec = {
        {"task", {{"instruction", traj.task.instruction}, {"suite", to_string(traj.task.suite)}, {"subgoals", subgoals}}},
        {"frames", frames},
        {"segments", segments}};
    out << rec.dump() << '\n';
  }
}

}  // namespace vlasteer
