#include "vlasteer/bench.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "vlasteer/error.hpp"

namespace vlasteer {
namespace {

std::vector<int> task_list(const BenchConfig& cfg, SuiteTag suite) {
  if (!cfg.tasks.empty()) return cfg.tasks;
  std::vector<int> all(static_cast<std::size_t>(suite_size(suite)));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return all;
}

std::vector<int> k_list(const BenchConfig& cfg, const SteerVariant& v) {
  if (v.k) return {*v.k};
  if (v.steer.strategy == Strategy::none || v.steer.strategy == Strategy::vanilla) return {1};
  return cfg.k_sweep;
}

// Shortest representation that parses back to the same double.
std::string num(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// One RFC-4180 record; false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string cur;
  bool quoted = false;
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          cur += '"';
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\r' && in.peek() == '\n') {
    } else if (c == '\n') {
      break;
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV field");
  fields.push_back(std::move(cur));
  return true;
}

template <class T>
T parse_number(const std::string& s, const char* column) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(std::string("bad value for ") + column + ": '" + s + "'");
  return v;
}

constexpr std::array<std::string_view, 13> kTrialColumns = {
    "suite", "task_index", "strategy", "k", "seed", "success", "env_steps", "reasoning_steps",
    "sample_ms", "verify_wait_ms", "amortized_overhead_ms_per_step", "fallback_count", "misaligned_segments"};

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

struct Acc {
  int trials = 0, successes = 0, fallbacks = 0, misaligned = 0, timed = 0;
  double steps = 0, reasoning = 0, sample = 0, wait = 0;
  void add(const TrialRecord& r) {
    ++trials;
    successes += r.success ? 1 : 0;
    fallbacks += r.fallback_count;
    misaligned += r.misaligned_segments;
    steps += static_cast<double>(r.env_steps);
    reasoning += r.reasoning_steps;
    if (r.env_steps > 0) {
      ++timed;
      sample += r.sample_ms / static_cast<double>(r.env_steps);
      wait += r.verify_wait_ms / static_cast<double>(r.env_steps);
    }
  }
};

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed0, SuiteTag suite, int task_index, int trial) {
  return derive_seed({seed0, static_cast<std::uint64_t>(suite), static_cast<std::uint64_t>(task_index),
                      static_cast<std::uint64_t>(trial)});
}

BenchRun run_trials(const BenchConfig& cfg) {
  cfg.validate();
  BenchRun run;
  for (SuiteTag suite : cfg.suites)
    for (int task : task_list(cfg, suite))
      for (const auto& v : cfg.steer)
        for (int k : k_list(cfg, v)) {
          SteerConfig scfg = v.steer;
          scfg.k = k;
          for (int t = 0; t < cfg.trials_per_task; ++t) {
            EpisodeTrace trace;
            run.records.push_back(run_episode(suite, task, trial_seed(cfg.seed0, suite, task, t), cfg.policy, scfg,
                                              cfg.latency, &trace));
            run.traces.push_back(std::move(trace));
          }
        }
  return run;
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
  using Key = std::tuple<std::string, std::string, std::string, int>;
  std::vector<Key> order;
  std::map<Key, Acc> acc;
  auto add = [&](Key key, const TrialRecord& r) {
    auto [it, fresh] = acc.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.add(r);
  };
  for (const auto& r : records) {
    const std::string suite(to_string(r.suite));
    const std::string strategy(to_string(r.strategy));
    add({suite, std::to_string(r.task_index), strategy, r.k}, r);
  }
  for (const auto& r : records) add({std::string(to_string(r.suite)), "all", std::string(to_string(r.strategy)), r.k}, r);

  std::vector<SummaryRow> rows;
  for (const auto& key : order) {
    const Acc& a = acc.at(key);
    SummaryRow row;
    std::tie(row.suite, row.task, row.strategy, row.k) = key;
    row.trials = a.trials;
    row.successes = a.successes;
    row.success_rate = static_cast<double>(a.successes) / a.trials;
    std::tie(row.ci_lo, row.ci_hi) = wilson_interval(a.successes, a.trials);
    row.mean_steps = a.steps / a.trials;
    row.mean_reasoning_steps = a.reasoning / a.trials;
    if (a.timed > 0) {
      row.sample_ms_per_step = a.sample / a.timed;
      row.verify_wait_ms_per_step = a.wait / a.timed;
    }
    row.total_ms_per_step = row.sample_ms_per_step + row.verify_wait_ms_per_step;
    row.fallback_count = a.fallbacks;
    row.misaligned_segments = a.misaligned;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<LatencyRow> latency_breakdown(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw InvalidArgument("latency_breakdown: no records");
  std::vector<std::pair<Strategy, int>> order;
  std::map<std::pair<Strategy, int>, Acc> acc;
  for (const auto& r : records) {
    auto [it, fresh] = acc.try_emplace({r.strategy, r.k});
    if (fresh) order.emplace_back(r.strategy, r.k);
    it->second.add(r);
  }
  std::vector<LatencyRow> rows;
  for (const auto& key : order) {
    const Acc& a = acc.at(key);
    LatencyRow row;
    row.strategy = std::string(to_string(key.first));
    row.k = key.second;
    row.trials = a.trials;
    if (a.timed > 0) {
      row.sample_ms_per_step = a.sample / a.timed;
      row.verify_wait_ms_per_step = a.wait / a.timed;
    }
    row.total_ms_per_step = row.sample_ms_per_step + row.verify_wait_ms_per_step;
    row.success_rate = static_cast<double>(a.successes) / a.trials;
    row.mean_steps = a.steps / a.trials;
    rows.push_back(row);
  }
  return rows;
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  for (std::size_t i = 0; i < kTrialColumns.size(); ++i) out << (i ? "," : "") << kTrialColumns[i];
  out << "\r\n";
  for (const auto& r : records) {
    out << csv_field(to_string(r.suite)) << ',' << r.task_index << ',' << csv_field(to_string(r.strategy)) << ','
        << r.k << ',' << r.seed << ',' << (r.success ? 1 : 0) << ',' << r.env_steps << ',' << r.reasoning_steps
        << ',' << num(r.sample_ms) << ',' << num(r.verify_wait_ms) << ',' << num(r.amortized_overhead_ms_per_step)
        << ',' << r.fallback_count << ',' << r.misaligned_segments << "\r\n";
  }
}

std::vector<TrialRecord> read_trials_csv(std::istream& in) {
  std::vector<std::string> f;
  if (!read_csv_record(in, f)) throw ParseError("empty trials CSV");
  if (f.size() != kTrialColumns.size() || !std::equal(f.begin(), f.end(), kTrialColumns.begin()))
    throw ParseError("trials CSV header does not match the record schema");
  std::vector<TrialRecord> out;
  int line = 1;
  while (read_csv_record(in, f)) {
    ++line;
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != kTrialColumns.size())
      throw ParseError("trials CSV line " + std::to_string(line) + ": expected 13 fields");
    TrialRecord r;
    auto suite = parse_suite(f[0]);
    auto strategy = parse_strategy(f[2]);
    if (!suite || !strategy) throw ParseError("trials CSV line " + std::to_string(line) + ": unknown suite or strategy");
    r.suite = *suite;
    r.task_index = parse_number<int>(f[1], "task_index");
    r.strategy = *strategy;
    r.k = parse_number<int>(f[3], "k");
    r.seed = parse_number<std::uint64_t>(f[4], "seed");
    r.success = parse_number<int>(f[5], "success") != 0;
    r.env_steps = parse_number<long>(f[6], "env_steps");
    r.reasoning_steps = parse_number<int>(f[7], "reasoning_steps");
    r.sample_ms = parse_number<double>(f[8], "sample_ms");
    r.verify_wait_ms = parse_number<double>(f[9], "verify_wait_ms");
    r.amortized_overhead_ms_per_step = parse_number<double>(f[10], "amortized_overhead_ms_per_step");
    r.fallback_count = parse_number<int>(f[11], "fallback_count");
    r.misaligned_segments = parse_number<int>(f[12], "misaligned_segments");
    out.push_back(r);
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "suite,task,strategy,k,trials,successes,success_rate,ci_lo,ci_hi,mean_steps,mean_reasoning_steps,"
         "sample_ms_per_step,verify_wait_ms_per_step,total_ms_per_step,fallback_count,misaligned_segments\r\n";
  for (const auto& r : rows) {
    out << csv_field(r.suite) << ',' << csv_field(r.task) << ',' << csv_field(r.strategy) << ',' << r.k << ','
        << r.trials << ',' << r.successes << ',' << num(r.success_rate) << ',' << num(r.ci_lo) << ','
        << num(r.ci_hi) << ',' << num(r.mean_steps) << ',' << num(r.mean_reasoning_steps) << ','
        << num(r.sample_ms_per_step) << ',' << num(r.verify_wait_ms_per_step) << ',' << num(r.total_ms_per_step)
        << ',' << r.fallback_count << ',' << r.misaligned_segments << "\r\n";
  }
}

void write_latency_csv(std::ostream& out, const std::vector<LatencyRow>& rows) {
  out << "strategy,k,trials,sample_ms_per_step,verify_wait_ms_per_step,total_ms_per_step,success_rate,"
         "mean_steps\r\n";
  for (const auto& r : rows)
    out << csv_field(r.strategy) << ',' << r.k << ',' << r.trials << ',' << num(r.sample_ms_per_step) << ','
        << num(r.verify_wait_ms_per_step) << ',' << num(r.total_ms_per_step) << ',' << num(r.success_rate) << ','
        << num(r.mean_steps) << "\r\n";
}

void write_trace_jsonl(std::ostream& out, const BenchRun& run) {
  using nlohmann::json;
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    const TrialRecord& r = run.records[i];
    json segs = json::array();
    for (const auto& s : run.traces[i].segments) {
      json cands = json::array();
      for (const auto& c : s.candidates)
        cands.push_back({{"index", c.index}, {"len", c.len}, {"gen_finish", c.gen_finish}, {"aligned", c.aligned}});
      json verdicts = json::array();
      for (const auto& v : s.verdicts)
        verdicts.push_back({{"candidate", v.candidate}, {"accept", v.accept}, {"issued_at", v.issued_at},
                            {"arrived_at", v.arrived_at}});
      json tokens = json::array();
      for (Action a : s.tokens) tokens.push_back(to_string(a));
      segs.push_back({{"index", s.index},
                      {"plan", s.plan_text},
                      {"target", to_string(s.target)},
                      {"candidates", cands},
                      {"verdicts", verdicts},
                      {"chosen", s.chosen},
                      {"tokens", tokens},
                      {"fallback", s.fallback},
                      {"started_at", s.started_at},
                      {"decided_at", s.decided_at},
                      {"sample_ms", s.sample_ms},
                      {"verify_wait_ms", s.verify_wait_ms},
                      {"aligned", s.aligned}});
    }
    json line = {{"suite", to_string(r.suite)}, {"task_index", r.task_index}, {"strategy", to_string(r.strategy)},
                 {"k", r.k}, {"seed", r.seed}, {"segments", segs}};
    out << line.dump() << '\n';
  }
}

std::vector<std::string> self_check(const BenchRun& run, const LatencyModel& lat) {
  std::vector<std::string> bad;
  const int m = lat.control_steps_per_action;
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    const TrialRecord& r = run.records[i];
    const auto& segs = run.traces[i].segments;
    const std::string who = std::string(to_string(r.suite)) + "/" + std::to_string(r.task_index) + "/" +
                            std::string(to_string(r.strategy)) + "/k" + std::to_string(r.k) + "/seed " +
                            std::to_string(r.seed) + ": ";

    if (r.env_steps > 0 && !close(r.amortized_overhead_ms_per_step, (r.sample_ms + r.verify_wait_ms) / r.env_steps))
      bad.push_back(who + "amortized overhead differs from (sample + wait) / env_steps");

    if (r.strategy == Strategy::vanilla) {
      if (!segs.empty()) bad.push_back(who + "vanilla episode has reasoning segments");
      if (!close(r.sample_ms, static_cast<double>(r.env_steps) * sampling_step_cost(1, lat)) || r.verify_wait_ms != 0)
        bad.push_back(who + "vanilla time accounting mismatch");
      continue;
    }

    VirtualMs clock = 0, sample = 0, wait = 0;
    long steps = 0;
    int misaligned = 0, fallbacks = 0;
    WorldState s = sample_scene(r.suite, r.task_index, r.seed).state;
    for (const auto& seg : segs) {
      if (!close(seg.started_at, clock)) bad.push_back(who + "segment " + std::to_string(seg.index) + " starts off-clock");
      if (!close(seg.decided_at - seg.started_at, seg.sample_ms + seg.verify_wait_ms))
        bad.push_back(who + "segment " + std::to_string(seg.index) + " time split does not add up");
      clock = seg.decided_at;
      sample += seg.sample_ms;
      wait += seg.verify_wait_ms;
      s = replay(s, seg.tokens);
      steps += static_cast<long>(seg.tokens.size() - 1) * m;
      const bool aligned = eval_predicate(s, seg.target);
      if (aligned != seg.aligned) bad.push_back(who + "segment " + std::to_string(seg.index) + " alignment flag mismatch");
      misaligned += aligned ? 0 : 1;
      fallbacks += seg.fallback ? 1 : 0;
      if (r.strategy == Strategy::seal && !seg.fallback) {
        const Verdict* win = nullptr;
        for (const auto& v : seg.verdicts)
          if (v.accept && (win == nullptr || v.arrived_at < win->arrived_at)) win = &v;
        if (win == nullptr || win->candidate != seg.chosen)
          bad.push_back(who + "segment " + std::to_string(seg.index) + " chosen is not the earliest accept");
      }
    }
    if (!close(sample + wait, r.sample_ms + r.verify_wait_ms) || !close(clock, r.sample_ms + r.verify_wait_ms))
      bad.push_back(who + "accounting identity violated");
    if (steps != r.env_steps) bad.push_back(who + "env_steps differ from the replayed trace");
    if (misaligned != r.misaligned_segments) bad.push_back(who + "misaligned_segments differ from the replayed trace");
    if (fallbacks != r.fallback_count) bad.push_back(who + "fallback_count differs from the trace");
    if (static_cast<int>(segs.size()) != r.reasoning_steps) bad.push_back(who + "reasoning_steps differ from the trace");
    if (all_satisfied(s, sample_scene(r.suite, r.task_index, r.seed).task.subgoals) != r.success)
      bad.push_back(who + "success differs from the replayed final state");
  }
  return bad;
}

std::vector<std::string> run_suite(const BenchConfig& cfg) {
  const BenchRun run = run_trials(cfg);
  auto bad = self_check(run, cfg.latency);
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw Error("cannot create " + cfg.output_dir.string() + ": " + ec.message());
  auto open = [&](const char* name) {
    std::ofstream f(cfg.output_dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (cfg.output_dir / name).string());
    return f;
  };
  {
    auto f = open("trials.csv");
    write_trials_csv(f, run.records);
  }
  {
    auto f = open("trace.jsonl");
    write_trace_jsonl(f, run);
  }
  {
    auto f = open("summary.csv");
    write_summary_csv(f, summarize(run.records));
  }
  if (!run.records.empty()) {
    auto f = open("latency.csv");
    write_latency_csv(f, latency_breakdown(run.records));
  }
  return bad;
}

AlignmentEstimate estimate_alignment_loss(const PolicyConfig& pcfg, SuiteTag suite, int task_index,
                                          const PlanRecord& plan, int m, std::uint64_t seed, int k,
                                          const VerifierConfig& vcfg) {
  if (m < 1) throw InvalidArgument("estimate_alignment_loss: m must be >= 1");
  if (k < 1) throw InvalidArgument("estimate_alignment_loss: k must be >= 1");
  LatencyModel lat;
  lat.verifier = vcfg;
  const WorldState start = sample_scene(suite, task_index, seed).state;
  const EnvPool pool(start, k);
  int misaligned = 0;
  for (int r = 0; r < m; ++r) {
    HypothesizeOptions opt;
    opt.episode_seed = derive_seed({seed, static_cast<std::uint64_t>(r)});
    const auto cands = hypothesize_predict(pool, plan, suite, pcfg, lat, opt);
    int chosen = 0;
    if (k > 1) {
      Rng vrng = make_stream(opt.episode_seed, Stream::verifier, static_cast<std::uint64_t>(plan.index));
      chosen = seal_select(cands, plan, start, vcfg, Fallback::earliest_finished, vrng).chosen;
    }
    const auto& c = cands[static_cast<std::size_t>(chosen)];
    const WorldState executed = pcfg.dynamics_noise > 0.0 ? replay(start, c.tokens) : c.final_state(start);
    misaligned += eval_predicate(executed, plan.target) ? 0 : 1;
  }
  AlignmentEstimate e;
  e.rollouts = m;
  e.loss = static_cast<double>(misaligned) / m;
  e.std_error = std::sqrt(e.loss * (1 - e.loss) / m);
  return e;
}

}  // namespace vlasteer
