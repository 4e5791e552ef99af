#include "latchbench/orchestrator/pipeline.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <memory>

#include "latchbench/core/hash.hpp"
#include "latchbench/forge/dialogue.hpp"
#include "latchbench/orchestrator/worker_pool.hpp"
#include "latchbench/sim/latch.hpp"
#include "latchbench/strategy/engine.hpp"
#include "latchbench/strategy/prompts.hpp"

namespace latchbench::orchestrator {

namespace fs = std::filesystem;

std::uint64_t pair_seed(std::uint64_t global_seed, const std::string& trajectory_id, strategy::Strategy kind) {
  return derive_seed(global_seed, trajectory_id, strategy::to_string(kind));
}

std::uint64_t trajectory_seed(std::uint64_t global_seed, const std::string& dialogue_id, forge::Tier tier) {
  return derive_seed(global_seed, dialogue_id, forge::to_string(tier));
}

namespace {

void note(const PipelineOptions& o, const std::string& line) {
  if (o.log) *o.log << line << '\n';
}

/// Backends are shared by every run that names the same descriptor id.
class BackendPool {
 public:
  backend::CompletionBackend& get(const backend::BackendDescriptor& d) {
    const auto desc = canonical_dump(backend::to_json(d));
    auto it = backends_.find(d.id);
    if (it != backends_.end()) {
      if (it->second.first != desc) {
        throw ConfigError(fmt::format("backend id '{}' is declared twice with different settings", d.id));
      }
      return *it->second.second;
    }
    auto b = backend::make_backend(d);
    auto& ref = *b;
    backends_.emplace(d.id, std::make_pair(desc, std::move(b)));
    return ref;
  }

  json counters() const {
    json j = json::object();
    for (const auto& [id, entry] : backends_) {
      const auto c = entry.second->counters();
      j[id] = {{"kind", backend::to_string(entry.second->kind())},
               {"calls", c.calls},
               {"retries", c.retries},
               {"failures", c.failures}};
    }
    return j;
  }

 private:
  std::map<std::string, std::pair<std::string, std::unique_ptr<backend::CompletionBackend>>> backends_;
};

std::vector<forge::Trajectory> load_forged(const RunConfig& config) {
  const auto path = config.experiment_dir() / kTrajectoriesFile;
  if (!fs::exists(path)) {
    throw ConfigError(fmt::format("{} not found; run `forge build` first", path.string()));
  }
  return forge::load_trajectories(path);
}

/// Keeps the last stored line per key, restricted to `keys`, sorted by key.
template <typename Record, typename Parse, typename Key>
std::map<std::string, std::pair<Record, std::string>> read_store(const fs::path& path, Parse parse, Key key_of) {
  std::map<std::string, std::pair<Record, std::string>> out;
  if (!fs::exists(path)) return out;
  read_jsonl(path, [&](const json& j, std::size_t) {
    auto rec = parse(j);
    auto key = key_of(rec);
    out.insert_or_assign(key, std::make_pair(std::move(rec), sha256_hex(canonical_dump(j))));
  });
  return out;
}

void reset_file(const fs::path& p) {
  std::error_code ec;
  fs::remove(p, ec);
}

}  // namespace

StageSummary forge_build(const RunConfig& config, const PipelineOptions& options) {
  check_launch_paths(config);
  if (config.tiers.empty()) throw ConfigError("config lists no tiers to forge");
  const auto dialogues = forge::load_dialogues(config.corpus, config.limit);
  std::unique_ptr<backend::CompletionBackend> update_backend;
  if (config.update_mode == forge::UpdateMode::dynamic) update_backend = backend::make_backend(*config.update_backend);

  StageSummary summary;
  std::vector<forge::Trajectory> out;
  std::vector<std::string> skips;
  for (const auto& d : dialogues) {
    const auto pair = forge::generate_update(d, config.update_mode, update_backend.get());
    for (const auto& spec : config.tiers) {
      ++summary.total;
      const auto seed = trajectory_seed(config.global_seed, d.id, spec.tier);
      try {
        forge::Trajectory t;
        switch (spec.tier) {
          case forge::Tier::shallow: t = forge::build_shallow(d, pair, seed, spec.budget, config.forge); break;
          case forge::Tier::high_entropy: t = forge::build_high_entropy(d, pair, seed, spec.budget, config.forge); break;
          case forge::Tier::hijack: {
            const auto chain = forge::make_fact_chain(derive_seed(seed, "chain"), 3,
                                                      forge::make_signal(derive_seed(seed, "signal")));
            t = forge::build_hijack(d, pair, chain, seed, spec.budget, config.forge);
            break;
          }
          case forge::Tier::equidistant: t = forge::build_equidistant(pair, seed, spec.budget, config.forge); break;
        }
        const auto violations = forge::check_invariants(t, 0.02, config.forge.seed_tolerance);
        if (!violations.empty()) throw GeometryError(violations.front());
        out.push_back(std::move(t));
        ++summary.executed;
      } catch (const GeometryError& e) {
        skips.push_back(canonical_dump({{"dialogue_id", d.id}, {"tier", forge::to_string(spec.tier)}, {"reason", e.what()}}));
      } catch (const DomainError& e) {
        skips.push_back(canonical_dump({{"dialogue_id", d.id}, {"tier", forge::to_string(spec.tier)}, {"reason", e.what()}}));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  const auto dir = config.experiment_dir();
  fs::create_directories(dir);
  forge::save_trajectories(dir / kTrajectoriesFile, out);
  write_lines_atomic(dir / kForgeSkipsFile, skips);
  note(options, fmt::format("forged {} trajectories ({} skipped) into {}", out.size(), skips.size(),
                            (dir / kTrajectoriesFile).string()));
  return summary;
}

StageSummary run_experiment(const RunConfig& config, const PipelineOptions& options) {
  const auto dir = config.experiment_dir();
  const auto trajectories = load_forged(config);
  const auto runs_path = dir / kRunsFile;
  const auto ledger_path = dir / kLedgerFile;
  const auto blob_dir = dir / kBlobDir;

  struct Item {
    const forge::Trajectory* trajectory;
    const StrategySpec* spec;
    std::string key;
    std::string input_hash;
    std::uint64_t seed;
  };
  std::vector<Item> items;
  for (const auto& t : trajectories) {
    for (const auto& s : config.strategies) {
      Item item{&t, &s, t.id + "|" + s.label, {}, pair_seed(config.global_seed, t.id, s.kind)};
      json input = {{"trajectory", forge::to_json(t)},
                    {"strategy", s.to_json()},
                    {"seed", item.seed},
                    {"model_pair", config.model_pair},
                    {"prompt_version", strategy::kPromptVersion},
                    {"executive_history_window",
                     config.executive_history_window ? json(*config.executive_history_window) : json(nullptr)}};
      item.input_hash = sha256_hex(canonical_dump(input));
      items.push_back(std::move(item));
    }
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.key < b.key; });

  StageSummary summary;
  summary.total = items.size();
  std::map<std::string, std::pair<strategy::AgentRunRecord, std::string>> stored;
  std::vector<std::size_t> pending;
  if (options.resume) {
    const auto ledger = RunLedger::load(ledger_path);
    try {
      stored = read_store<strategy::AgentRunRecord>(
          runs_path, [&](const json& j) { return strategy::run_record_from_json(j, blob_dir); },
          [](const strategy::AgentRunRecord& r) { return r.key(); });
    } catch (const Error& e) {
      throw LedgerError(fmt::format("run store is unreadable ({}); start a fresh run without --resume", e.what()));
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto* entry = ledger.latest("run|" + items[i].key);
      auto it = stored.find(items[i].key);
      const bool reusable = entry && entry->status == EntryStatus::done && entry->input_hash == items[i].input_hash &&
                            it != stored.end() && it->second.second == entry->output_hash;
      if (reusable) {
        ++summary.skipped;
      } else {
        pending.push_back(i);
      }
    }
  } else {
    fs::create_directories(dir);
    reset_file(runs_path);
    reset_file(ledger_path);
    reset_file(dir / kVerdictsFile);
    for (std::size_t i = 0; i < items.size(); ++i) pending.push_back(i);
  }

  BackendPool pool;
  // Instantiate up front so configuration errors surface before any work.
  for (const auto& s : config.strategies) {
    for (const auto* d : {&s.backend, &s.architect, &s.executive}) {
      if (*d) pool.get(**d);
    }
  }

  strategy::StrategyOptions base_options;
  base_options.model_pair = config.model_pair;
  base_options.executive_history_window = config.executive_history_window;

  auto work = [&](std::size_t n) -> strategy::AgentRunRecord {
    const auto& item = items[pending[n]];
    auto opts = base_options;
    opts.label = item.spec->label;
    const auto& t = *item.trajectory;
    switch (item.spec->kind) {
      case strategy::Strategy::vanilla: return strategy::run_vanilla(t, pool.get(*item.spec->backend), item.seed, opts);
      case strategy::Strategy::reflexion:
        return strategy::run_reflexion(t, pool.get(*item.spec->backend), item.seed, opts);
      case strategy::Strategy::ssrp:
        return strategy::run_ssrp(t, pool.get(*item.spec->architect), pool.get(*item.spec->executive),
                                  item.spec->granularity, item.seed, opts);
    }
    throw ConfigError("unknown strategy kind");
  };

  std::size_t stored_count = 0;
  {
    JsonlAppender runs_out(runs_path);
    JsonlAppender ledger_out(ledger_path);
    auto on_result = [&](std::size_t n, strategy::AgentRunRecord&& record) {
      const auto& item = items[pending[n]];
      const auto j = strategy::to_json(record, blob_dir);
      runs_out.append(j);
      ledger_out.append(to_json(LedgerEntry{"run|" + item.key, record.error ? EntryStatus::error : EntryStatus::done,
                                            item.input_hash, sha256_hex(canonical_dump(j)), record.wall_time_ms}));
      ++summary.executed;
      ++stored_count;
      return !(options.stop_after && stored_count >= *options.stop_after);
    };
    run_bounded<strategy::AgentRunRecord>(pending.size(), config.parallelism, work, on_result);
  }
  if (options.stop_after && summary.executed < pending.size()) {
    summary.interrupted = true;
    note(options, fmt::format("interrupted after {} of {} pending runs", summary.executed, pending.size()));
    return summary;
  }

  // Final store: one line per key, sorted, in the current item set only.
  auto all = read_store<strategy::AgentRunRecord>(
      runs_path, [&](const json& j) { return strategy::run_record_from_json(j, blob_dir); },
      [](const strategy::AgentRunRecord& r) { return r.key(); });
  std::vector<std::string> lines;
  for (const auto& item : items) {
    auto it = all.find(item.key);
    if (it == all.end()) throw Error(fmt::format("run {} missing from store after execution", item.key));
    summary.errors += it->second.first.error.has_value();
    lines.push_back(canonical_dump(strategy::to_json(it->second.first, blob_dir)));
  }
  write_lines_atomic(runs_path, lines);
  write_text_atomic(dir / "run_summary.json", pool.counters().dump(2) + "\n");
  note(options, fmt::format("runs: {} total, {} executed, {} reused, {} errors", summary.total, summary.executed,
                            summary.skipped, summary.errors));
  return summary;
}

StageSummary judge_experiment(const RunConfig& config, const PipelineOptions& options) {
  const auto dir = config.experiment_dir();
  const auto trajectories = load_forged(config);
  std::map<std::string, const forge::Trajectory*> by_id;
  for (const auto& t : trajectories) by_id[t.id] = &t;
  const auto runs = load_runs(dir);
  if (runs.empty()) throw ConfigError(fmt::format("no runs in {}; run `run` first", (dir / kRunsFile).string()));
  const auto verdicts_path = dir / kVerdictsFile;
  const auto ledger_path = dir / kLedgerFile;
  const auto judge_desc = canonical_dump(backend::to_json(config.judge));

  std::vector<std::string> input_hashes;
  for (const auto& r : runs) {
    if (!by_id.contains(r.trajectory_id)) {
      throw ConfigError(fmt::format("run {} refers to unknown trajectory {}", r.key(), r.trajectory_id));
    }
    input_hashes.push_back(sha256_hex(canonical_dump(strategy::to_json(r)) + judge_desc));
  }

  StageSummary summary;
  summary.total = runs.size();
  std::vector<std::size_t> pending;
  std::map<std::string, std::pair<judge::Verdict, std::string>> stored;
  if (options.resume) {
    const auto ledger = RunLedger::load(ledger_path);
    try {
      stored = read_store<judge::Verdict>(verdicts_path, judge::verdict_from_json,
                                          [](const judge::Verdict& v) { return v.key(); });
    } catch (const Error& e) {
      throw LedgerError(fmt::format("verdict store is unreadable ({}); judge again without --resume", e.what()));
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto* entry = ledger.latest("judge|" + runs[i].key());
      auto it = stored.find(runs[i].key());
      if (entry && entry->status == EntryStatus::done && entry->input_hash == input_hashes[i] && it != stored.end() &&
          it->second.second == entry->output_hash) {
        ++summary.skipped;
      } else {
        pending.push_back(i);
      }
    }
  } else {
    reset_file(verdicts_path);
    for (std::size_t i = 0; i < runs.size(); ++i) pending.push_back(i);
  }

  auto judge_backend = backend::make_backend(config.judge);
  const judge::RefusalDetector refusal;
  auto work = [&](std::size_t n) -> judge::Verdict {
    const auto& r = runs[pending[n]];
    return judge::judge_record(r, *by_id.at(r.trajectory_id), *judge_backend, refusal);
  };
  std::size_t stored_count = 0;
  {
    JsonlAppender out(verdicts_path);
    JsonlAppender ledger_out(ledger_path);
    auto on_result = [&](std::size_t n, judge::Verdict&& v) {
      const auto j = judge::to_json(v);
      out.append(j);
      ledger_out.append(to_json(LedgerEntry{"judge|" + v.key(), v.judge_error ? EntryStatus::error : EntryStatus::done,
                                            input_hashes[pending[n]], sha256_hex(canonical_dump(j)), 0}));
      ++summary.executed;
      ++stored_count;
      return !(options.stop_after && stored_count >= *options.stop_after);
    };
    run_bounded<judge::Verdict>(pending.size(), config.parallelism, work, on_result);
  }
  if (options.stop_after && summary.executed < pending.size()) {
    summary.interrupted = true;
    return summary;
  }

  auto all = read_store<judge::Verdict>(verdicts_path, judge::verdict_from_json,
                                        [](const judge::Verdict& v) { return v.key(); });
  std::vector<std::string> lines;
  for (const auto& r : runs) {
    auto it = all.find(r.key());
    if (it == all.end()) throw Error(fmt::format("verdict {} missing after judging", r.key()));
    summary.errors += it->second.first.judge_error.has_value();
    lines.push_back(canonical_dump(judge::to_json(it->second.first)));
  }
  write_lines_atomic(verdicts_path, lines);
  const auto c = judge_backend->counters();
  write_text_atomic(dir / "judge_summary.json",
                    json{{config.judge.id, {{"calls", c.calls}, {"retries", c.retries}, {"failures", c.failures}}}}
                            .dump(2) +
                        "\n");
  note(options, fmt::format("verdicts: {} total, {} judged, {} reused, {} judge errors", summary.total,
                            summary.executed, summary.skipped, summary.errors));
  return summary;
}

metrics::MetricsReport score_experiment(const RunConfig& config, bool write) {
  const auto dir = config.experiment_dir();
  const auto verdicts = load_verdicts(dir);
  if (verdicts.empty()) throw ConfigError(fmt::format("no verdicts in {}", (dir / kVerdictsFile).string()));
  metrics::ReportConfig rc{config.experiment_id, config.strategy_labels(), config.baseline};
  metrics::MetricsReport report;
  try {
    report = metrics::aggregate_report(verdicts, rc);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (write) metrics::write_report(report, dir);
  return report;
}

std::vector<strategy::AgentRunRecord> load_runs(const fs::path& experiment_dir) {
  std::vector<strategy::AgentRunRecord> out;
  const auto path = experiment_dir / kRunsFile;
  if (!fs::exists(path)) return out;
  const auto blobs = experiment_dir / kBlobDir;
  read_jsonl(path, [&](const json& j, std::size_t) { out.push_back(strategy::run_record_from_json(j, blobs)); });
  return out;
}

std::vector<judge::Verdict> load_verdicts(const fs::path& experiment_dir) {
  std::vector<judge::Verdict> out;
  const auto path = experiment_dir / kVerdictsFile;
  if (!fs::exists(path)) return out;
  read_jsonl(path, [&](const json& j, std::size_t) { out.push_back(judge::verdict_from_json(j)); });
  return out;
}

std::vector<SimulationRow> simulate_sweep(const SimulateSpec& spec, std::uint64_t global_seed) {
  std::vector<SimulationRow> rows;
  for (double x : spec.x_grid) {
    SimulationRow row;
    row.x = x;
    row.fact_prob = sim::retrieval_prob(spec.simulator.curve, x);
    sim::Scene scene;
    scene.fact_probs.assign(spec.hops, row.fact_prob);
    scene.p_g1 = spec.p_g1;
    scene.p_g2 = spec.p_g2;
    std::size_t wins = 0;
    for (std::size_t i = 0; i < spec.n; ++i) {
      const auto seed = derive_seed(global_seed, "simulate", fmt::format("{:.6f}", x), std::to_string(i));
      wins += sim::draw_outcome(scene, spec.simulator.latch, spec.simulator.options, 0, seed).outcome ==
              sim::Outcome::success;
    }
    row.empirical = static_cast<double>(wins) / static_cast<double>(spec.n);
    std::vector<double> probs(spec.hops, row.fact_prob);
    row.predicted = sim::predicted_joint_success(probs);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace latchbench::orchestrator
