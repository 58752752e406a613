#pragma once

// Simulated reasoning policy: a think branch that writes three-field plan
// records and an act branch that emits actions until it decides to think
// again. Defect rates are configuration, not learned quantities.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vlasteer/rng.hpp"
#include "vlasteer/taskworld.hpp"

namespace vlasteer {

/// Multipliers a suite applies to the base defect rates.
struct CorruptionFactors {
  double plan = 1.0;
  double wrong = 1.0;
  double noise = 1.0;
  double ground = 1.0;  // vanilla policy grounding error
  bool operator==(const CorruptionFactors&) const = default;
};

std::map<SuiteTag, CorruptionFactors> default_corruption();

struct PolicyConfig {
  double p_plan_err = 0.0;  // plan targets a wrong subgoal
  double p_wrong = 0.2;     // act branch pursues a subgoal other than the plan's
  double p_noise = 0.05;    // per-step uniformly random action
  int h_max = 24;           // actions per segment before a forced Think
  double t_act = 1.0;       // temperature analog, scales p_wrong and p_noise
  double dynamics_noise = 0.0;  // per-step action substitution in predicted rollouts
  std::map<SuiteTag, CorruptionFactors> corruption = default_corruption();

  /// Throws ConfigError.
  void validate() const;
  bool operator==(const PolicyConfig&) const = default;
};

struct EffectiveRates {
  double plan_err = 0;
  double wrong = 0;
  double noise = 0;
  double ground = 0;
};

/// Suite-adjusted defect probabilities, clamped to [0, 1].
EffectiveRates effective_rates(const PolicyConfig& cfg, SuiteTag suite);

struct PlanRecord {
  std::vector<std::string> plans;
  std::vector<std::string> done;
  std::string now;
  Subgoal target;
  int index = 0;

  /// "Plans: ...\nWhat has been done: ...\nNow I need to do: ..."
  std::string render() const;
  bool operator==(const PlanRecord&) const = default;
};

/// Byte-level check of the three-field template.
bool matches_plan_template(std::string_view text);

/// Parses rendered text back into a record (index is not part of the text).
/// Throws ParseError.
PlanRecord parse_plan_record(std::string_view text);

/// Scene-feasible subgoals of the same shape as `target` but with a
/// different object (In/On) or fixture (Closed/Activated), in id order.
std::vector<Subgoal> alternative_subgoals(const WorldState& state, const Subgoal& target);

/// The think branch. Returns nullopt when every task subgoal already holds.
std::optional<PlanRecord> generate_plan(const WorldState& state, const PlanRecord* last,
                                        const TaskSpec& task, const PolicyConfig& cfg, Rng& rng);

struct SegmentState {
  Subgoal intended;
  int steps_taken = 0;
};

SegmentState open_segment(const PlanRecord& plan, const WorldState& state, SuiteTag suite,
                          const PolicyConfig& cfg, Rng& rng);

/// The act branch: Think when the intended subgoal holds or the segment cap
/// is reached, otherwise an expert step (or, with the noise probability, a
/// uniformly random motor action).
Action next_token(const WorldState& state, SegmentState& seg, SuiteTag suite,
                  const PolicyConfig& cfg, Rng& rng);

struct VanillaState {
  std::optional<Subgoal> intended;
  int steps_taken = 0;
  int groundings = 0;
};

/// No-reasoning baseline. Grounds an intended subgoal straight from the task
/// and acts toward it; Think only when the whole task is done.
Action vanilla_action(const WorldState& state, const TaskSpec& task, const PolicyConfig& cfg,
                      VanillaState& vs, Rng& rng);

}  // namespace vlasteer
