#include "vlasteer/policy.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

#include "vlasteer/error.hpp"

namespace vlasteer {
namespace {

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must be in [0,1]");
}

constexpr std::string_view kPlansPrefix = "Plans: ";
constexpr std::string_view kDonePrefix = "What has been done: ";
constexpr std::string_view kNowPrefix = "Now I need to do: ";
constexpr std::string_view kNothing = "nothing";
constexpr std::string_view kSep = "; ";

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += kSep;
    out += items[i];
  }
  return out;
}

std::vector<std::string> split(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = s.find(kSep, start);
    out.emplace_back(s.substr(start, at == std::string_view::npos ? s.npos : at - start));
    if (at == std::string_view::npos) break;
    start = at + kSep.size();
  }
  return out;
}

}  // namespace

std::map<SuiteTag, CorruptionFactors> default_corruption() {
  return {
      {SuiteTag::id, {1.0, 1.0, 1.0, 1.0}},
      {SuiteTag::lang_rephrase, {1.0, 1.25, 1.0, 2.5}},
      {SuiteTag::lang_object_property, {1.0, 1.5, 1.0, 2.0}},
      {SuiteTag::visual_scene, {1.0, 1.25, 1.5, 1.5}},
      {SuiteTag::visual_viewpoint, {1.0, 2.0, 3.0, 2.0}},
      {SuiteTag::compose, {1.0, 2.5, 1.5, 3.0}},
  };
}

void PolicyConfig::validate() const {
  check_probability(p_plan_err, "p_plan_err");
  check_probability(p_wrong, "p_wrong");
  check_probability(p_noise, "p_noise");
  check_probability(dynamics_noise, "dynamics_noise");
  if (h_max < 1) throw ConfigError("h_max must be >= 1");
  if (!(t_act >= 0.0)) throw ConfigError("t_act must be >= 0");
  for (const auto& [suite, f] : corruption)
    if (!(f.plan >= 0 && f.wrong >= 0 && f.noise >= 0 && f.ground >= 0))
      throw ConfigError("corruption multipliers must be >= 0 (" + std::string(to_string(suite)) + ")");
}

EffectiveRates effective_rates(const PolicyConfig& cfg, SuiteTag suite) {
  CorruptionFactors f;
  if (auto it = cfg.corruption.find(suite); it != cfg.corruption.end()) f = it->second;
  return {clamp01(cfg.p_plan_err * f.plan), clamp01(cfg.p_wrong * cfg.t_act * f.wrong),
          clamp01(cfg.p_noise * cfg.t_act * f.noise),
          clamp01((cfg.p_plan_err + cfg.p_wrong) * cfg.t_act * f.ground)};
}

std::string PlanRecord::render() const {
  std::string out;
  out += kPlansPrefix;
  out += join(plans);
  out += '\n';
  out += kDonePrefix;
  out += done.empty() ? std::string(kNothing) : join(done);
  out += '\n';
  out += kNowPrefix;
  out += now;
  return out;
}

bool matches_plan_template(std::string_view text) {
  static const std::regex re(
      "Plans: [a-z]+( [a-z]+)*(; [a-z]+( [a-z]+)*)*\n"
      "What has been done: (nothing|[a-z]+( [a-z]+)*(; [a-z]+( [a-z]+)*)*)\n"
      "Now I need to do: [a-z]+( [a-z]+)*");
  return std::regex_match(text.begin(), text.end(), re);
}

PlanRecord parse_plan_record(std::string_view text) {
  if (!matches_plan_template(text)) throw ParseError("plan record does not match the template");
  const std::size_t l1 = text.find('\n');
  const std::size_t l2 = text.find('\n', l1 + 1);
  PlanRecord rec;
  rec.plans = split(text.substr(kPlansPrefix.size(), l1 - kPlansPrefix.size()));
  std::string_view done = text.substr(l1 + 1 + kDonePrefix.size(), l2 - l1 - 1 - kDonePrefix.size());
  if (done != kNothing) rec.done = split(done);
  rec.now = std::string(text.substr(l2 + 1 + kNowPrefix.size()));
  rec.target = parse_plan_sentence(rec.now);
  return rec;
}

std::vector<Subgoal> alternative_subgoals(const WorldState& state, const Subgoal& target) {
  std::vector<Subgoal> out;
  switch (target.predicate) {
    case Predicate::In:
    case Predicate::On:
      for (const auto& o : state.objects)
        if (o.name != target.object) out.push_back({target.predicate, o.name, target.fixture});
      break;
    case Predicate::Closed:
      for (const auto& f : state.fixtures)
        if (is_openable(f.kind) && f.name != target.fixture) out.push_back({Predicate::Closed, "", f.name});
      break;
    case Predicate::Activated:
      for (const auto& f : state.fixtures)
        if (f.kind == FixtureKind::stove && f.name != target.fixture)
          out.push_back({Predicate::Activated, "", f.name});
      break;
  }
  return out;
}

std::optional<PlanRecord> generate_plan(const WorldState& state, const PlanRecord* last,
                                        const TaskSpec& task, const PolicyConfig& cfg, Rng& rng) {
  const auto next = first_unmet(state, task.subgoals);
  if (!next) return std::nullopt;

  PlanRecord rec;
  rec.index = last ? last->index + 1 : 0;
  for (const auto& g : task.subgoals) rec.plans.push_back(plan_sentence(g));
  rec.done.assign(rec.plans.begin(), rec.plans.begin() + static_cast<std::ptrdiff_t>(*next));
  rec.target = task.subgoals[*next];

  const EffectiveRates rates = effective_rates(cfg, task.suite);
  if (rng.bernoulli(rates.plan_err)) {
    const auto alts = alternative_subgoals(state, rec.target);
    if (!alts.empty()) {
      // A hallucinated step replaces the pending entry of the plan list.
      rec.target = alts[rng.index(alts.size())];
      rec.plans[*next] = plan_sentence(rec.target);
    }
  }
  rec.now = rec.plans[*next];
  return rec;
}

SegmentState open_segment(const PlanRecord& plan, const WorldState& state, SuiteTag suite,
                          const PolicyConfig& cfg, Rng& rng) {
  SegmentState seg{plan.target, 0};
  if (rng.bernoulli(effective_rates(cfg, suite).wrong)) {
    const auto alts = alternative_subgoals(state, plan.target);
    if (!alts.empty()) seg.intended = alts[rng.index(alts.size())];
  }
  return seg;
}

Action next_token(const WorldState& state, SegmentState& seg, SuiteTag suite, const PolicyConfig& cfg,
                  Rng& rng) {
  if (seg.steps_taken >= cfg.h_max || eval_predicate(state, seg.intended)) return Action::Think;
  Action a;
  if (rng.bernoulli(effective_rates(cfg, suite).noise)) {
    a = kMotorActions[rng.index(kMotorActions.size())];
  } else {
    a = expert_action(state, seg.intended);
  }
  ++seg.steps_taken;
  return a;
}

Action vanilla_action(const WorldState& state, const TaskSpec& task, const PolicyConfig& cfg,
                      VanillaState& vs, Rng& rng) {
  const auto next = first_unmet(state, task.subgoals);
  if (!next) return Action::Think;
  const EffectiveRates rates = effective_rates(cfg, task.suite);

  const bool regrounding =
      !vs.intended || vs.steps_taken >= cfg.h_max || eval_predicate(state, *vs.intended);
  if (regrounding) {
    vs.steps_taken = 0;
    ++vs.groundings;
    vs.intended = task.subgoals[*next];
    // Mis-grounding onto an already satisfied subgoal is redrawn a bounded
    // number of times, then falls back to the true next subgoal.
    for (int attempt = 0; attempt < 16; ++attempt) {
      Subgoal pick = task.subgoals[*next];
      if (rng.bernoulli(rates.ground)) {
        const auto alts = alternative_subgoals(state, pick);
        if (!alts.empty()) pick = alts[rng.index(alts.size())];
      }
      if (!eval_predicate(state, pick)) {
        vs.intended = pick;
        break;
      }
    }
  }

  Action a;
  if (rng.bernoulli(rates.noise)) {
    a = kMotorActions[rng.index(kMotorActions.size())];
  } else {
    a = expert_action(state, *vs.intended);
  }
  ++vs.steps_taken;
  return a;
}

}  // namespace vlasteer
