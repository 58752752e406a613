#include "vlasteer/rollout.hpp"

#include <algorithm>

#include "vlasteer/error.hpp"

namespace vlasteer {

EnvPool::EnvPool(const WorldState& start, int k_) : replicas(static_cast<std::size_t>(k_), start), k(k_) {
  if (k_ < 1) throw InvalidArgument("EnvPool: K must be >= 1");
  base_hash = state_hash(start);
}

bool EnvPool::coherent() const {
  return std::all_of(replicas.begin(), replicas.end(),
                     [&](const WorldState& s) { return state_hash(s) == base_hash; });
}

std::vector<CandidateRollout> hypothesize_predict(const EnvPool& pool, const PlanRecord& plan, SuiteTag suite,
                                                  const PolicyConfig& cfg, const LatencyModel& lat,
                                                  const HypothesizeOptions& opt) {
  if (!pool.coherent()) throw InvalidArgument("hypothesize_predict: pool replicas diverged from base");
  PolicyConfig capped = cfg;
  if (opt.action_cap >= 0) capped.h_max = std::min(cfg.h_max, opt.action_cap);
  const VirtualMs pass_cost = sampling_step_cost(pool.k, lat);
  const int n = opt.candidates < 0 ? pool.k : std::min(opt.candidates, pool.k);

  std::vector<CandidateRollout> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const auto kk = static_cast<std::uint64_t>(k);
    const auto seg_index = static_cast<std::uint64_t>(plan.index);
    Rng rng = make_stream(opt.episode_seed, Stream::candidate, seg_index, kk);
    Rng dyn = make_stream(opt.episode_seed, Stream::dynamics, seg_index, kk);

    CandidateRollout c;
    c.index = k;
    c.base_hash = pool.base_hash;
    WorldState s = pool.replicas[static_cast<std::size_t>(k)];
    SegmentState seg = open_segment(plan, s, suite, capped, rng);
    c.intended = seg.intended;
    while (true) {
      const Action a = next_token(s, seg, suite, capped, rng);
      c.tokens.push_back(a);
      if (a == Action::Think) break;
      Action applied = a;
      if (cfg.dynamics_noise > 0.0 && dyn.bernoulli(cfg.dynamics_noise))
        applied = kMotorActions[dyn.index(kMotorActions.size())];
      s = step(s, applied);
      c.trace.push_back(s);
    }
    c.segment_len = static_cast<int>(c.trace.size());
    c.gen_finish = opt.start + (c.segment_len * lat.control_steps_per_action + 1) * pass_cost;
    out.push_back(std::move(c));
  }
  return out;
}

EnvPool& sync_pool(EnvPool& pool, const CandidateRollout& chosen) {
  if (chosen.base_hash != pool.base_hash) throw InvalidArgument("sync_pool: stale candidate");
  if (chosen.trace.empty()) return pool;
  return reset_pool(pool, chosen.trace.back());
}

EnvPool& reset_pool(EnvPool& pool, const WorldState& state) {
  for (auto& r : pool.replicas) r = state;
  pool.base_hash = state_hash(state);
  return pool;
}

WorldState replay(WorldState state, const std::vector<Action>& tokens) {
  for (Action a : tokens)
    if (a != Action::Think) state = step(state, a);
  return state;
}

}  // namespace vlasteer
