#pragma once

// Seeded sweeps over suites, tasks, strategies and K with CSV / JSONL
// output, interval statistics and trace self-checks.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vlasteer/steer.hpp"

namespace vlasteer {

struct SteerVariant {
  SteerConfig steer;
  std::optional<int> k;  // unset: every K of the sweep (none, vanilla: K=1)
};

struct BenchConfig {
  std::vector<SuiteTag> suites = {SuiteTag::id};
  std::vector<int> tasks;  // empty: all tasks of each suite
  int trials_per_task = 50;
  std::vector<int> k_sweep = {1, 2, 5, 10};
  std::uint64_t seed0 = 0;
  PolicyConfig policy;
  std::vector<SteerVariant> steer = {SteerVariant{}};  // distinct strategies
  LatencyModel latency;
  std::filesystem::path output_dir = "out";

  void validate() const;
};

/// Strict parse: unknown keys and wrong types are ConfigError.
BenchConfig parse_bench_config(std::string_view json_text);
BenchConfig load_bench_config(const std::filesystem::path& path);

/// Seed of one trial; identical across strategies and K.
std::uint64_t trial_seed(std::uint64_t seed0, SuiteTag suite, int task_index, int trial);

struct BenchRun {
  std::vector<TrialRecord> records;
  std::vector<EpisodeTrace> traces;  // parallel to records
};

/// Executes the cross-product in (suite, task, strategy, k, trial) order.
BenchRun run_trials(const BenchConfig& cfg);

struct SummaryRow {
  std::string suite;
  std::string task;  // index, or "all"
  std::string strategy;
  int k = 0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0;
  double ci_lo = 0;
  double ci_hi = 0;
  double mean_steps = 0;
  double mean_reasoning_steps = 0;
  double sample_ms_per_step = 0;
  double verify_wait_ms_per_step = 0;
  double total_ms_per_step = 0;
  int fallback_count = 0;
  int misaligned_segments = 0;
};

/// Per (suite, task, strategy, k) plus a task="all" row per (suite,
/// strategy, k); rows follow first-appearance order of the records.
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);

struct LatencyRow {
  std::string strategy;
  int k = 0;
  int trials = 0;
  double sample_ms_per_step = 0;
  double verify_wait_ms_per_step = 0;
  double total_ms_per_step = 0;
  double success_rate = 0;
  double mean_steps = 0;
};

/// Means over records with env_steps > 0 of the per-step overheads, grouped
/// by (strategy, k). Throws InvalidArgument on empty input.
std::vector<LatencyRow> latency_breakdown(const std::vector<TrialRecord>& records);

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_trials_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_latency_csv(std::ostream& out, const std::vector<LatencyRow>& rows);
void write_trace_jsonl(std::ostream& out, const BenchRun& run);

/// Accounting identity, amortized overhead, fallback and misalignment counts
/// recomputed by replaying executed tokens from the sampled scene. Returns
/// one message per violation.
std::vector<std::string> self_check(const BenchRun& run, const LatencyModel& lat);

/// run_trials, self_check, then trials.csv, trace.jsonl, summary.csv and
/// latency.csv under cfg.output_dir. Returns the violations.
std::vector<std::string> run_suite(const BenchConfig& cfg);

/// Wilson score interval. Throws InvalidArgument on invalid counts.
std::pair<double, double> wilson_interval(int successes, int trials, double confidence = 0.95);

/// Newcombe hybrid score interval for p1 - p2.
std::pair<double, double> difference_interval(int s1, int n1, int s2, int n2, double confidence = 0.95);

struct AlignmentEstimate {
  double loss = 0;
  double std_error = 0;
  int rollouts = 0;
};

/// Fraction of m independent segments, rolled from the scene's start state
/// under `plan`, whose executed final state fails plan.target. With k > 1
/// each segment selects among k candidates by seal_select. Rollout r of
/// K=1 and of K>1 share candidate 0.
AlignmentEstimate estimate_alignment_loss(const PolicyConfig& pcfg, SuiteTag suite, int task_index,
                                          const PlanRecord& plan, int m, std::uint64_t seed, int k = 1,
                                          const VerifierConfig& vcfg = {});

}  // namespace vlasteer
