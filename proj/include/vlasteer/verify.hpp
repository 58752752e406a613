#pragma once

// Binary plan/outcome verdicts and the virtual-time latency model.

#include "vlasteer/policy.hpp"
#include "vlasteer/rng.hpp"
#include "vlasteer/taskworld.hpp"

namespace vlasteer {

/// Virtual milliseconds.
using VirtualMs = double;

struct ServiceTime {
  enum class Kind : std::uint8_t { uniform, constant };
  Kind kind = Kind::uniform;
  VirtualMs lo = 7000.0;
  VirtualMs hi = 10000.0;
  VirtualMs c = 0.0;  // constant
  bool operator==(const ServiceTime&) const = default;
};

struct VerifierConfig {
  double alpha = 0.05;  // accepts a misaligned outcome
  double beta = 0.05;   // rejects an aligned outcome
  ServiceTime service_time;
  int pool_limit = 1;  // verifications in flight at once

  void validate() const;
  bool operator==(const VerifierConfig&) const = default;
};

inline constexpr double kSampleC1 = 98.0 / 9.0;
inline constexpr double kSampleC0 = 86.0 - kSampleC1;

struct LatencyModel {
  VirtualMs sample_c0 = kSampleC0;
  VirtualMs sample_c1 = kSampleC1;
  /// Policy forward passes per symbolic action. Each env step of a
  /// TrialRecord is one such pass.
  int control_steps_per_action = 16;
  VerifierConfig verifier;

  void validate() const;
  bool operator==(const LatencyModel&) const = default;
};

struct Verdict {
  int candidate = 0;
  bool accept = false;
  VirtualMs issued_at = 0;
  VirtualMs arrived_at = 0;
  bool operator==(const Verdict&) const = default;
};

/// Accept iff the predicted final state satisfies the plan's target.
/// `initial` is part of the interface and ignored.
bool verdict_oracle(const WorldState& initial, const WorldState& final, const PlanRecord& plan);

/// Flips a true verdict with probability beta and a false one with alpha.
/// Always consumes exactly one draw.
bool verdict_noisy(bool truth, const VerifierConfig& cfg, Rng& rng);

/// Batched cost of one policy forward pass over K candidates: c0 + c1*K.
/// Throws InvalidArgument for K < 1.
VirtualMs sampling_step_cost(int k, const LatencyModel& lat);

VirtualMs draw_service_time(const VerifierConfig& cfg, Rng& rng);

}  // namespace vlasteer
