#include <algorithm>

#include "vlasteer/error.hpp"
#include "vlasteer/steer.hpp"

namespace vlasteer {
namespace {

void run_vanilla(const Scene& sc, std::uint64_t seed, const PolicyConfig& pcfg, const LatencyModel& lat,
                 long budget, TrialRecord& r) {
  const int m = lat.control_steps_per_action;
  const VirtualMs pass = sampling_step_cost(1, lat);
  Rng rng = make_stream(seed, Stream::vanilla);
  VanillaState vs;
  WorldState s = sc.state;
  while (r.env_steps + m <= budget) {
    const Action a = vanilla_action(s, sc.task, pcfg, vs, rng);
    if (a == Action::Think) break;
    s = step(s, a);
    r.env_steps += m;
    r.sample_ms += m * pass;
  }
  r.reasoning_steps = vs.groundings;
  r.success = all_satisfied(s, sc.task.subgoals);
}

}  // namespace

TrialRecord run_episode(SuiteTag suite, int task_index, std::uint64_t seed, const PolicyConfig& pcfg,
                        const SteerConfig& scfg, const LatencyModel& lat, EpisodeTrace* trace) {
  pcfg.validate();
  scfg.validate();
  lat.validate();
  const Scene sc = sample_scene(suite, task_index, seed);
  const bool multi = scfg.strategy == Strategy::seal || scfg.strategy == Strategy::value;
  const int k = multi ? scfg.k : 1;
  const int m = lat.control_steps_per_action;
  const long budget = static_cast<long>(kBudgetPerHmax) * pcfg.h_max;

  TrialRecord r;
  r.suite = suite;
  r.task_index = task_index;
  r.strategy = scfg.strategy;
  r.k = k;
  r.seed = seed;

  if (scfg.strategy == Strategy::vanilla) {
    run_vanilla(sc, seed, pcfg, lat, budget, r);
  } else {
    WorldState state = sc.state;
    EnvPool pool(state, k);
    Rng plan_rng = make_stream(seed, Stream::plan);
    std::optional<PlanRecord> last;
    VirtualMs now = 0;

    while (r.reasoning_steps < kMaxReasoningSteps) {
      auto plan = generate_plan(state, last ? &*last : nullptr, sc.task, pcfg, plan_rng);
      if (!plan) break;
      const long remaining = (budget - r.env_steps) / m;
      if (remaining <= 0) break;

      HypothesizeOptions opt;
      opt.episode_seed = seed;
      opt.start = 0;  // round-relative, so sums do not pick up rounding from `now`
      opt.action_cap = static_cast<int>(std::min<long>(remaining, pcfg.h_max));
      if (scfg.strategy == Strategy::value && scfg.chunk_len > 0)
        opt.action_cap = std::min(opt.action_cap, scfg.chunk_len);
      const auto cands = hypothesize_predict(pool, *plan, suite, pcfg, lat, opt);

      Selection sel;
      switch (scfg.strategy) {
        case Strategy::seal: {
          Rng vrng = make_stream(seed, Stream::verifier, static_cast<std::uint64_t>(plan->index));
          sel = seal_select(cands, *plan, state, lat.verifier, scfg.fallback, vrng);
          break;
        }
        case Strategy::value: sel = value_select(cands, state, sc.task, scfg); break;
        case Strategy::none:
        case Strategy::vanilla: sel = {0, cands.front().gen_finish, {}, false}; break;
      }
      const CandidateRollout& c = cands[static_cast<std::size_t>(sel.chosen)];

      const WorldState executed = pcfg.dynamics_noise > 0.0 ? replay(state, c.tokens) : c.final_state(state);
      sync_pool(pool, c);
      if (pcfg.dynamics_noise > 0.0) reset_pool(pool, executed);
      const bool aligned = eval_predicate(executed, plan->target);

      const VirtualMs sample = scfg.strategy == Strategy::seal ? c.gen_finish : sel.decided_at;
      const VirtualMs wait = sel.decided_at - sample;
      r.sample_ms += sample;
      r.verify_wait_ms += wait;
      r.env_steps += static_cast<long>(c.segment_len) * m;
      r.reasoning_steps += 1;
      r.fallback_count += sel.fallback_used ? 1 : 0;
      r.misaligned_segments += aligned ? 0 : 1;

      if (trace != nullptr) {
        SegmentTrace st;
        st.index = plan->index;
        st.plan_text = plan->render();
        st.target = plan->target;
        for (const auto& cand : cands)
          st.candidates.push_back({cand.index, cand.segment_len, now + cand.gen_finish,
                                   eval_predicate(cand.final_state(state), plan->target)});
        st.verdicts = sel.verdicts_seen;
        for (auto& v : st.verdicts) {
          v.issued_at += now;
          v.arrived_at += now;
        }
        st.chosen = sel.chosen;
        st.tokens = c.tokens;
        st.fallback = sel.fallback_used;
        st.started_at = now;
        st.decided_at = now + sel.decided_at;
        st.sample_ms = sample;
        st.verify_wait_ms = wait;
        st.aligned = aligned;
        trace->segments.push_back(std::move(st));
      }

      state = executed;
      now += sel.decided_at;
      last = std::move(plan);
    }
    r.success = all_satisfied(state, sc.task.subgoals);
  }

  if (r.env_steps > 0) r.amortized_overhead_ms_per_step = (r.sample_ms + r.verify_wait_ms) / r.env_steps;
  return r;
}

}  // namespace vlasteer
