#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "vlasteer/annotate.hpp"
#include "vlasteer/bench.hpp"
#include "vlasteer/error.hpp"

using namespace vlasteer;

namespace {

int report_violations(const std::vector<std::string>& bad) {
  for (const auto& v : bad) std::cerr << "self-check: " << v << '\n';
  if (!bad.empty()) std::cerr << bad.size() << " self-check violation(s)\n";
  return bad.empty() ? 0 : 1;
}

int cmd_run(const std::string& config_path) {
  const BenchConfig cfg = load_bench_config(config_path);
  const auto bad = run_suite(cfg);
  std::ifstream summary(cfg.output_dir / "latency.csv");
  std::cout << summary.rdbuf();
  std::cout << "wrote " << (cfg.output_dir / "trials.csv").string() << ", trace.jsonl, summary.csv, latency.csv\n";
  return report_violations(bad);
}

int cmd_annotate(const std::string& suite_name, int episodes, std::uint64_t seed, const std::string& out_path) {
  const auto suite = parse_suite(suite_name);
  if (!suite) throw ConfigError("unknown suite '" + suite_name + "'");
  if (episodes < 1) throw ConfigError("--episodes must be >= 1");
  std::vector<AnnotatedDemo> data;
  for (int i = 0; i < episodes; ++i) {
    const Scene sc = sample_scene(*suite, i % suite_size(*suite), derive_seed({seed, static_cast<std::uint64_t>(i)}));
    Trajectory t = generate_demo(sc, seed + static_cast<std::uint64_t>(i));
    auto segs = segment_trajectory(t);
    data.emplace_back(std::move(t), std::move(segs));
  }
  const ValidationReport rep = validate_annotations(data);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error("cannot write " + out_path);
  write_dataset_jsonl(out, data);
  std::cout << rep.trajectories << " demos, " << rep.segments << " segments, " << rep.passed << " passed, "
            << rep.failed << " failed\n";
  return report_violations(rep.violations);
}

int cmd_report(const std::string& in_path, const std::filesystem::path& out_dir) {
  std::ifstream in(in_path, std::ios::binary);
  if (!in) throw Error("cannot open " + in_path);
  const auto records = read_trials_csv(in);
  std::vector<std::string> bad;
  for (const auto& r : records)
    if (r.env_steps > 0 &&
        std::abs(r.amortized_overhead_ms_per_step - (r.sample_ms + r.verify_wait_ms) / r.env_steps) > 1e-9 *
                                                                                                        (1 + r.amortized_overhead_ms_per_step))
      bad.push_back("seed " + std::to_string(r.seed) + ": amortized overhead mismatch");
  std::filesystem::create_directories(out_dir);
  std::ofstream summary(out_dir / "summary.csv", std::ios::binary);
  write_summary_csv(summary, summarize(records));
  if (!records.empty()) {
    std::ofstream lat(out_dir / "latency.csv", std::ios::binary);
    write_latency_csv(lat, latency_breakdown(records));
  }
  std::cout << records.size() << " records summarized into " << out_dir.string() << '\n';
  return report_violations(bad);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plan-verified policy steering simulator and benchmark"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "Run a benchmark sweep");
  run->add_option("--config", config, "JSON benchmark config")->required()->check(CLI::ExistingFile);

  std::string suite = "id", out_path = "demos.jsonl";
  int episodes = 100;
  std::uint64_t seed = 0;
  auto* ann = app.add_subcommand("annotate", "Generate and validate annotated expert demos");
  ann->add_option("--suite", suite, "Suite tag");
  ann->add_option("--episodes", episodes, "Number of demos");
  ann->add_option("--seed", seed, "Base seed");
  ann->add_option("--out", out_path, "Output JSONL file");

  std::string in_path, out_dir = "report";
  auto* rep = app.add_subcommand("report", "Summarize a trials CSV");
  rep->add_option("--in", in_path, "trials.csv")->required()->check(CLI::ExistingFile);
  rep->add_option("--out", out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config);
    if (*ann) return cmd_annotate(suite, episodes, seed, out_path);
    if (*rep) return cmd_report(in_path, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
