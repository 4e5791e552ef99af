#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "latchbench/judge/judge.hpp"
#include "latchbench/metrics/report.hpp"
#include "latchbench/orchestrator/config.hpp"
#include "latchbench/orchestrator/ledger.hpp"

namespace latchbench::orchestrator {

struct PipelineOptions {
  bool resume = false;
  /// Test hook: stop after this many results have been stored, leaving the
  /// stores as an interrupted process would.
  std::optional<std::size_t> stop_after;
  std::ostream* log = nullptr;
};

struct StageSummary {
  std::size_t total = 0;
  std::size_t executed = 0;
  std::size_t skipped = 0;  // reused from a previous invocation
  std::size_t errors = 0;
  bool interrupted = false;

  bool partial_failure() const { return errors > 0 || interrupted; }
};

/// Store file names inside the experiment directory.
inline constexpr const char* kTrajectoriesFile = "trajectories.jsonl";
inline constexpr const char* kRunsFile = "runs.jsonl";
inline constexpr const char* kVerdictsFile = "verdicts.jsonl";
inline constexpr const char* kLedgerFile = "ledger.jsonl";
inline constexpr const char* kForgeSkipsFile = "forge_skips.jsonl";
inline constexpr const char* kBlobDir = "blobs";

/// Seed of one (trajectory, strategy kind) pair. SSRP variants of different
/// granularity share it, so tier comparisons are paired.
std::uint64_t pair_seed(std::uint64_t global_seed, const std::string& trajectory_id, strategy::Strategy kind);

/// Seed of one forged trajectory.
std::uint64_t trajectory_seed(std::uint64_t global_seed, const std::string& dialogue_id, forge::Tier tier);

/// Forges every configured tier for every loaded dialogue into
/// trajectories.jsonl (sorted by id). Dialogues that cannot be placed are
/// listed in forge_skips.jsonl with the reason.
StageSummary forge_build(const RunConfig& config, const PipelineOptions& options = {});

/// Runs every (trajectory, strategy) pair into runs.jsonl.
StageSummary run_experiment(const RunConfig& config, const PipelineOptions& options = {});

/// Judges every stored run into verdicts.jsonl.
StageSummary judge_experiment(const RunConfig& config, const PipelineOptions& options = {});

/// Aggregates verdicts.jsonl and writes report.json, report.csv and
/// curve_points.csv.
metrics::MetricsReport score_experiment(const RunConfig& config, bool write = true);

std::vector<strategy::AgentRunRecord> load_runs(const std::filesystem::path& experiment_dir);
std::vector<judge::Verdict> load_verdicts(const std::filesystem::path& experiment_dir);

/// Result of a latch-simulator sweep over the configured x grid.
struct SimulationRow {
  double x = 0.0;
  double fact_prob = 0.0;
  double empirical = 0.0;
  double predicted = 0.0;
};

std::vector<SimulationRow> simulate_sweep(const SimulateSpec& spec, std::uint64_t global_seed);

}  // namespace latchbench::orchestrator
