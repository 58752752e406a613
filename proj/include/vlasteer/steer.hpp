#pragma once

// Candidate selection strategies and the reasoning-step episode driver.

#include <map>
#include <string>
#include <vector>

#include "vlasteer/policy.hpp"
#include "vlasteer/rollout.hpp"
#include "vlasteer/verify.hpp"

namespace vlasteer {

enum class Strategy : std::uint8_t {
  seal,     // verify candidates as they finish, execute the first accepted
  value,    // argmax of a heuristic progress score, plan text unused
  none,     // execute one sampled candidate
  vanilla,  // no reasoning: act straight from the instruction
};

enum class Fallback : std::uint8_t { earliest_finished, random, longest };

std::string_view to_string(Strategy s);
std::string_view to_string(Fallback f);
std::optional<Strategy> parse_strategy(std::string_view s);
std::optional<Fallback> parse_fallback(std::string_view s);

std::map<SuiteTag, double> default_value_miscalibration();

struct SteerConfig {
  Strategy strategy = Strategy::seal;
  int k = 10;
  Fallback fallback = Fallback::earliest_finished;
  /// Weight of the spurious-progress term in heuristic_value, per suite.
  std::map<SuiteTag, double> value_miscalibration = default_value_miscalibration();
  /// value strategy: re-select every chunk_len actions (0 = whole segments).
  int chunk_len = 0;

  void validate() const;
  bool operator==(const SteerConfig&) const = default;
};

struct Selection {
  int chosen = 0;
  VirtualMs decided_at = 0;
  std::vector<Verdict> verdicts_seen;
  bool fallback_used = false;
};

/// Event-driven early-exit selection. Verifications are queued FIFO by
/// (gen_finish, index) onto pool_limit servers; the earliest arriving accept
/// (ties by index) wins and the rest are cancelled. `rng` supplies service
/// times and verdict noise in queue order, then the random fallback draw.
Selection seal_select(const std::vector<CandidateRollout>& cands, const PlanRecord& plan,
                      const WorldState& pool_base, const VerifierConfig& vcfg, Fallback fallback, Rng& rng);

/// Subgoals satisfied, minus normalized distance to the first unmet subgoal,
/// plus value_miscalibration[suite] times the number of non-task objects
/// sitting in fixtures the task fills.
double heuristic_value(const WorldState& state, const TaskSpec& task, const SteerConfig& cfg);

/// argmax of heuristic_value over final states, ties by lowest index.
/// decided_at is the last generation finish.
Selection value_select(const std::vector<CandidateRollout>& cands, const WorldState& pool_base,
                       const TaskSpec& task, const SteerConfig& cfg);

struct CandidateSummary {
  int index = 0;
  int len = 0;
  VirtualMs gen_finish = 0;
  bool aligned = false;  // predicted final satisfies the plan target
};

struct SegmentTrace {
  int index = 0;
  std::string plan_text;
  Subgoal target;
  std::vector<CandidateSummary> candidates;
  std::vector<Verdict> verdicts;
  int chosen = 0;
  std::vector<Action> tokens;  // executed, Think last
  bool fallback = false;
  VirtualMs started_at = 0;
  VirtualMs decided_at = 0;
  VirtualMs sample_ms = 0;
  VirtualMs verify_wait_ms = 0;
  bool aligned = false;  // executed outcome satisfies the plan target
};

struct TrialRecord {
  SuiteTag suite = SuiteTag::id;
  int task_index = 0;
  Strategy strategy = Strategy::seal;
  int k = 1;
  std::uint64_t seed = 0;
  bool success = false;
  long env_steps = 0;  // policy forward passes executed on the environment
  int reasoning_steps = 0;
  VirtualMs sample_ms = 0;
  VirtualMs verify_wait_ms = 0;
  VirtualMs amortized_overhead_ms_per_step = 0;
  int fallback_count = 0;
  int misaligned_segments = 0;
  bool operator==(const TrialRecord&) const = default;
};

struct EpisodeTrace {
  std::vector<SegmentTrace> segments;
};

inline constexpr int kBudgetPerHmax = 40;
inline constexpr int kMaxReasoningSteps = 40;

/// Runs one episode: plan, hypothesize K candidates, select, execute,
/// re-sync, until the plan generator reports completion or the step budget
/// (kBudgetPerHmax * h_max env steps) or reasoning budget runs out.
/// Strategies none and vanilla roll a single candidate regardless of k.
/// Throws ConfigError on invalid configuration.
TrialRecord run_episode(SuiteTag suite, int task_index, std::uint64_t seed, const PolicyConfig& pcfg,
                        const SteerConfig& scfg, const LatencyModel& lat, EpisodeTrace* trace = nullptr);

}  // namespace vlasteer
