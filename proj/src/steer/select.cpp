#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vlasteer/error.hpp"
#include "vlasteer/steer.hpp"

namespace vlasteer {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::seal: return "seal";
    case Strategy::value: return "value";
    case Strategy::none: return "none";
    case Strategy::vanilla: return "vanilla";
  }
  return "?";
}

std::string_view to_string(Fallback f) {
  switch (f) {
    case Fallback::earliest_finished: return "earliest_finished";
    case Fallback::random: return "random";
    case Fallback::longest: return "longest";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view s) {
  for (Strategy v : {Strategy::seal, Strategy::value, Strategy::none, Strategy::vanilla})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

std::optional<Fallback> parse_fallback(std::string_view s) {
  for (Fallback v : {Fallback::earliest_finished, Fallback::random, Fallback::longest})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

std::map<SuiteTag, double> default_value_miscalibration() {
  return {{SuiteTag::compose, 2.0}, {SuiteTag::visual_viewpoint, 2.0}};
}

void SteerConfig::validate() const {
  if (k < 1) throw ConfigError("steer.k must be >= 1");
  if (chunk_len < 0) throw ConfigError("steer.chunk_len must be >= 0");
  for (const auto& [suite, w] : value_miscalibration)
    if (!std::isfinite(w)) throw ConfigError("value_miscalibration must be finite");
}

Selection seal_select(const std::vector<CandidateRollout>& cands, const PlanRecord& plan,
                      const WorldState& pool_base, const VerifierConfig& vcfg, Fallback fallback, Rng& rng) {
  if (cands.empty()) throw InvalidArgument("seal_select: no candidates");
  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cands[a].gen_finish < cands[b].gen_finish;
  });

  // Non-preemptive FIFO servers: start times are fixed by the queue order
  // alone, so every verdict can be drawn up front and the cancelled tail
  // discarded afterwards.
  std::vector<VirtualMs> free_at(static_cast<std::size_t>(vcfg.pool_limit), 0.0);
  std::vector<Verdict> all;
  all.reserve(cands.size());
  for (std::size_t i : order) {
    const auto& c = cands[i];
    auto server = std::min_element(free_at.begin(), free_at.end());
    const VirtualMs start = std::max(c.gen_finish, *server);
    const VirtualMs done = start + draw_service_time(vcfg, rng);
    *server = done;
    const bool truth = verdict_oracle(pool_base, c.final_state(pool_base), plan);
    all.push_back({c.index, verdict_noisy(truth, vcfg, rng), start, done});
  }

  auto earlier = [](const Verdict& a, const Verdict& b) {
    return a.arrived_at < b.arrived_at || (a.arrived_at == b.arrived_at && a.candidate < b.candidate);
  };
  const Verdict* winner = nullptr;
  for (const auto& v : all)
    if (v.accept && (winner == nullptr || earlier(v, *winner))) winner = &v;

  Selection sel;
  if (winner != nullptr) {
    sel.chosen = winner->candidate;
    sel.decided_at = winner->arrived_at;
    for (const auto& v : all)
      if (!earlier(*winner, v)) sel.verdicts_seen.push_back(v);
    std::sort(sel.verdicts_seen.begin(), sel.verdicts_seen.end(), earlier);
    return sel;
  }

  sel.fallback_used = true;
  sel.verdicts_seen = all;
  std::sort(sel.verdicts_seen.begin(), sel.verdicts_seen.end(), earlier);
  sel.decided_at = sel.verdicts_seen.back().arrived_at;
  switch (fallback) {
    case Fallback::earliest_finished: sel.chosen = cands[order.front()].index; break;
    case Fallback::random: sel.chosen = cands[rng.index(cands.size())].index; break;
    case Fallback::longest: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < cands.size(); ++i)
        if (cands[i].segment_len > cands[best].segment_len) best = i;
      sel.chosen = cands[best].index;
      break;
    }
  }
  return sel;
}

double heuristic_value(const WorldState& s, const TaskSpec& task, const SteerConfig& cfg) {
  double score = 0;
  for (const auto& g : task.subgoals) score += eval_predicate(s, g) ? 1.0 : 0.0;

  if (auto next = first_unmet(s, task.subgoals)) {
    const Subgoal& g = task.subgoals[*next];
    const Fixture& f = *s.find_fixture(g.fixture);
    const Cell hand = s.gripper.pos;
    int dist = manhattan(hand, f.pos);
    if (g.predicate == Predicate::In || g.predicate == Predicate::On) {
      const Object& o = *s.find_object(g.object);
      if (s.gripper.held != o.id) dist = manhattan(hand, o.pos) + manhattan(o.pos, f.pos);
    }
    score -= static_cast<double>(dist) / (2.0 * (s.grid_width - 1 + s.grid_height - 1));
  }

  double weight = 0;
  if (auto it = cfg.value_miscalibration.find(task.suite); it != cfg.value_miscalibration.end())
    weight = it->second;
  if (weight != 0) {
    int spurious = 0;
    for (const auto& o : s.objects) {
      if (!o.container) continue;
      const std::string& fname = s.fixtures[*o.container].name;
      bool fills = false, task_object = false;
      for (const auto& g : task.subgoals) {
        if ((g.predicate == Predicate::In || g.predicate == Predicate::On) && g.fixture == fname) fills = true;
        if (g.object == o.name) task_object = true;
      }
      if (fills && !task_object) ++spurious;
    }
    score += weight * spurious;
  }
  return score;
}

Selection value_select(const std::vector<CandidateRollout>& cands, const WorldState& pool_base,
                       const TaskSpec& task, const SteerConfig& cfg) {
  if (cands.empty()) throw InvalidArgument("value_select: no candidates");
  Selection sel;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : cands) {
    const double v = heuristic_value(c.final_state(pool_base), task, cfg);
    if (v > best) {
      best = v;
      sel.chosen = c.index;
    }
    sel.decided_at = std::max(sel.decided_at, c.gen_finish);
  }
  return sel;
}

}  // namespace vlasteer
