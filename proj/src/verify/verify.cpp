#include "vlasteer/verify.hpp"

#include "vlasteer/error.hpp"

namespace vlasteer {

void VerifierConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("verifier.alpha must be in [0,1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("verifier.beta must be in [0,1]");
  if (pool_limit < 1) throw ConfigError("verifier.pool_limit must be >= 1");
  if (service_time.kind == ServiceTime::Kind::uniform) {
    if (!(service_time.lo >= 0.0 && service_time.lo <= service_time.hi))
      throw ConfigError("verifier.service_time needs 0 <= lo <= hi");
  } else if (!(service_time.c >= 0.0)) {
    throw ConfigError("verifier.service_time.c must be >= 0");
  }
}

void LatencyModel::validate() const {
  if (!(sample_c0 >= 0.0 && sample_c1 >= 0.0)) throw ConfigError("sample_c0 and sample_c1 must be >= 0");
  if (control_steps_per_action < 1) throw ConfigError("control_steps_per_action must be >= 1");
  verifier.validate();
}

bool verdict_oracle(const WorldState& /*initial*/, const WorldState& final, const PlanRecord& plan) {
  return eval_predicate(final, plan.target);
}

bool verdict_noisy(bool truth, const VerifierConfig& cfg, Rng& rng) {
  const bool flip = rng.bernoulli(truth ? cfg.beta : cfg.alpha);
  return flip ? !truth : truth;
}

VirtualMs sampling_step_cost(int k, const LatencyModel& lat) {
  if (k < 1) throw InvalidArgument("sampling_step_cost: K must be >= 1");
  return lat.sample_c0 + lat.sample_c1 * k;
}

VirtualMs draw_service_time(const VerifierConfig& cfg, Rng& rng) {
  if (cfg.service_time.kind == ServiceTime::Kind::constant) return cfg.service_time.c;
  return rng.uniform(cfg.service_time.lo, cfg.service_time.hi);
}

}  // namespace vlasteer
