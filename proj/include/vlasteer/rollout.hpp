#pragma once

// K environment replicas advanced in lockstep with K candidate token streams.

#include <cstdint>
#include <vector>

#include "vlasteer/policy.hpp"
#include "vlasteer/taskworld.hpp"
#include "vlasteer/verify.hpp"

namespace vlasteer {

struct EnvPool {
  std::vector<WorldState> replicas;
  int k = 0;
  std::uint64_t base_hash = 0;

  EnvPool() = default;
  EnvPool(const WorldState& start, int k);

  /// True when every replica hashes to base_hash.
  bool coherent() const;
};

struct CandidateRollout {
  int index = 0;
  /// Motor actions followed by one Think.
  std::vector<Action> tokens;
  /// Predicted state after each motor action (tokens.size() - 1 entries).
  std::vector<WorldState> trace;
  VirtualMs gen_finish = 0;
  int segment_len = 0;  // H_k, motor actions only
  Subgoal intended;
  std::uint64_t base_hash = 0;

  /// Predicted final state (the start state when H_k = 0).
  const WorldState& final_state(const WorldState& base) const {
    return trace.empty() ? base : trace.back();
  }
};

struct HypothesizeOptions {
  std::uint64_t episode_seed = 0;
  VirtualMs start = 0;  // virtual instant the round begins
  int action_cap = -1;  // extra per-round cap on H_k (< 0: h_max only)
  int candidates = -1;  // how many replicas to roll (< 0: all K)
};

/// Rolls every replica forward under its own candidate stream
/// (episode_seed, plan.index, candidate index) until Think. Completion
/// instants follow the lockstep batch schedule: candidate k finishes after
/// H_k * m + 1 forward passes at sampling_step_cost(K) each.
/// Throws InvalidArgument when the pool is not coherent.
std::vector<CandidateRollout> hypothesize_predict(const EnvPool& pool, const PlanRecord& plan, SuiteTag suite,
                                                  const PolicyConfig& cfg, const LatencyModel& lat,
                                                  const HypothesizeOptions& opt);

/// Sets every replica to the chosen candidate's final state. Throws
/// InvalidArgument when the candidate was produced from another base.
EnvPool& sync_pool(EnvPool& pool, const CandidateRollout& chosen);

/// Sets every replica to `state` (used when executed and predicted outcomes
/// differ).
EnvPool& reset_pool(EnvPool& pool, const WorldState& state);

/// Applies `tokens` (Think excluded) to `state` with the true dynamics.
WorldState replay(WorldState state, const std::vector<Action>& tokens);

}  // namespace vlasteer
