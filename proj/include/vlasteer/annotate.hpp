#pragma once

// Expert demonstrations segmented at subgoal-completion boundaries and
// annotated with three-field plan records.

#include <iosfwd>
#include <string>
#include <vector>

#include "vlasteer/policy.hpp"
#include "vlasteer/taskworld.hpp"

namespace vlasteer {

struct Frame {
  WorldState state;
  Action action = Action::Think;
  bool operator==(const Frame&) const = default;
};

/// frames[i+1].state == step(frames[i].state, frames[i].action). The last
/// frame holds the terminal state and a Think action.
struct Trajectory {
  TaskSpec task;
  std::vector<Frame> frames;
  bool operator==(const Trajectory&) const = default;
};

struct AnnotatedSegment {
  PlanRecord plan;
  std::string text;  // serialized reasoning, plan.render() when generated
  int start = 0;
  int end = 0;  // exclusive
  bool operator==(const AnnotatedSegment&) const = default;
};

/// Expert rollout subgoal by subgoal. Throws PlanningError if the expert
/// cannot finish within the grid-size step cap.
Trajectory generate_demo(const Scene& scene, std::uint64_t seed);

/// One segment per subgoal; segment j ends at the first frame whose state
/// satisfies subgoal j (the next segment starts there). The terminal
/// Think-frame belongs to the last segment. Throws PlanningError when some
/// subgoal never becomes true.
std::vector<AnnotatedSegment> segment_trajectory(const Trajectory& traj);

struct ValidationReport {
  int trajectories = 0;
  int segments = 0;
  int passed = 0;  // segments with no violation
  int failed = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

using AnnotatedDemo = std::pair<Trajectory, std::vector<AnnotatedSegment>>;

ValidationReport validate_annotations(const std::vector<AnnotatedDemo>& dataset);

/// One JSON object per line with keys task, frames, segments.
void write_dataset_jsonl(std::ostream& out, const std::vector<AnnotatedDemo>& dataset);

}  // namespace vlasteer
