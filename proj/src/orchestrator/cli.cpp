#include "latchbench/orchestrator/cli.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <optional>
#include <sstream>

#include "latchbench/forge/dialogue.hpp"
#include "latchbench/orchestrator/pipeline.hpp"

namespace latchbench::orchestrator {

namespace {

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool resume = false;
  bool dry_run = false;
  std::optional<std::size_t> stop_after;
};

RunConfig load(const GlobalFlags& flags) {
  if (flags.config.empty()) throw ConfigError("--config is required for this command");
  auto c = load_config(flags.config);
  if (flags.seed) c.global_seed = *flags.seed;
  return c;
}

void print_plan(std::ostream& out, const RunConfig& c, std::string_view command) {
  out << fmt::format("dry run: {}\n", command);
  out << fmt::format("  experiment   {} -> {}\n", c.experiment_id, c.experiment_dir().string());
  out << fmt::format("  global_seed  {}\n", c.global_seed);
  out << fmt::format("  corpus       {} (limit {})\n", c.corpus.string(), c.limit ? std::to_string(*c.limit) : "none");
  for (const auto& t : c.tiers) out << fmt::format("  tier         {} budget {}\n", forge::to_string(t.tier), t.budget);
  for (const auto& s : c.strategies) {
    std::string backends = s.backend ? s.backend->id : fmt::format("{} -> {}", s.architect->id, s.executive->id);
    out << fmt::format("  strategy     {} ({}) via {}{}\n", s.label, strategy::to_string(s.kind), backends,
                       s.kind == strategy::Strategy::ssrp
                           ? fmt::format(" [{}]", strategy::to_string(s.granularity))
                           : "");
  }
  out << fmt::format("  judge        {} ({})\n", c.judge.id, backend::to_string(c.judge.kind));
  out << fmt::format("  parallelism  {}\n", c.parallelism);
  const auto forged = c.experiment_dir() / kTrajectoriesFile;
  if (std::filesystem::exists(forged)) {
    const auto n = forge::load_trajectories(forged).size();
    out << fmt::format("  work items   {} trajectories x {} strategies = {}\n", n, c.strategies.size(),
                       n * c.strategies.size());
  } else {
    out << "  work items   trajectories not forged yet\n";
  }
  out << "nothing written\n";
}

int exit_for(const StageSummary& s) { return s.partial_failure() ? kExitPartial : kExitOk; }

/// Config for an ablation: its own experiment id, one tier, N = ablation_limit.
RunConfig ablation_config(const RunConfig& base, std::string_view suffix, forge::Tier tier) {
  RunConfig c = base;
  c.experiment_id = fmt::format("{}-{}", base.experiment_id, suffix);
  c.limit = base.ablation_limit;
  std::size_t budget = forge::kStressBudget;
  for (const auto& t : base.tiers) {
    if (t.tier == tier) budget = t.budget;
  }
  c.tiers = {{tier, budget}};
  return c;
}

int full_cycle(RunConfig& c, const GlobalFlags& flags, std::ostream& out) {
  PipelineOptions opts{flags.resume, std::nullopt, &out};
  if (!flags.resume || !std::filesystem::exists(c.experiment_dir() / kTrajectoriesFile)) forge_build(c, opts);
  const auto runs = run_experiment(c, opts);
  const auto verdicts = judge_experiment(c, opts);
  const auto report = score_experiment(c);
  for (const auto& row : report.strategy_totals) {
    out << fmt::format("{:<28} APA {:.4f}  n={}  refusal {:.4f}{}\n", row.strategy, row.apa, row.n, row.refusal_rate,
                       row.pi_rate ? fmt::format("  PI {:.4f}", *row.pi_rate) : "");
  }
  return (runs.partial_failure() || verdicts.partial_failure()) ? kExitPartial : kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"latchbench: long-context goal-pivot benchmark harness", "latchbench"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags flags;
  app.add_option("--config", flags.config, "Run config (JSON)");
  app.add_option("--seed", flags.seed, "Override global_seed");
  app.add_flag("--resume", flags.resume, "Skip work already done with matching hashes");
  app.add_flag("--dry-run", flags.dry_run, "Validate and print the plan; write nothing");
  app.add_option("--stop-after", flags.stop_after, "Stop after N stored results (testing)")->group("");

  auto* forge_cmd = app.add_subcommand("forge", "Corpus import and trajectory assembly");
  forge_cmd->require_subcommand(1);
  std::string import_input, import_output;
  auto* import_cmd = forge_cmd->add_subcommand("import", "Convert a MultiWOZ 2.2 split to corpus JSONL");
  import_cmd->add_option("--input", import_input, "MultiWOZ 2.2 file (dialog JSON or HF JSONL)")->required();
  import_cmd->add_option("--output", import_output, "Corpus JSONL to write")->required();
  auto* build_cmd = forge_cmd->add_subcommand("build", "Forge trajectories for the configured tiers");

  auto* run_cmd = app.add_subcommand("run", "Run every strategy over the forged trajectories");
  auto* judge_cmd = app.add_subcommand("judge", "Judge stored runs");
  auto* score_cmd = app.add_subcommand("score", "Aggregate verdicts into report files");
  auto* simulate_cmd = app.add_subcommand("simulate", "Latch-simulator sweep over the x grid");
  auto* ablate_cmd = app.add_subcommand("ablate", "Ablation studies");
  ablate_cmd->require_subcommand(1);
  auto* granularity_cmd = ablate_cmd->add_subcommand("granularity", "SSRP at hyper_compressed, optimal and verbose");
  auto* equidistant_cmd = ablate_cmd->add_subcommand("equidistant", "Vanilla on the 25%/75% symmetric geometry");
  auto* report_cmd = app.add_subcommand("report", "Print the metrics summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (*import_cmd) {
      if (flags.dry_run) {
        const auto n = forge::import_multiwoz(import_input).size();
        out << fmt::format("dry run: would write {} dialogues to {}\nnothing written\n", n, import_output);
        return kExitOk;
      }
      const auto dialogues = forge::import_multiwoz(import_input);
      forge::save_dialogues(import_output, dialogues);
      out << fmt::format("imported {} dialogues into {}\n", dialogues.size(), import_output);
      return kExitOk;
    }

    auto config = load(flags);
    const PipelineOptions opts{flags.resume, flags.stop_after, &out};

    if (*build_cmd) {
      if (flags.dry_run) {
        check_launch_paths(config);
        print_plan(out, config, "forge build");
        return kExitOk;
      }
      return exit_for(forge_build(config, opts));
    }
    if (*run_cmd) {
      if (flags.dry_run) {
        for (const auto& s : config.strategies) {
          for (const auto* d : {&s.backend, &s.architect, &s.executive}) {
            if (*d && (*d)->kind == backend::BackendKind::scripted) backend::make_backend(**d);
          }
        }
        print_plan(out, config, "run");
        return kExitOk;
      }
      return exit_for(run_experiment(config, opts));
    }
    if (*judge_cmd) {
      if (flags.dry_run) {
        print_plan(out, config, "judge");
        return kExitOk;
      }
      return exit_for(judge_experiment(config, opts));
    }
    if (*score_cmd || *report_cmd) {
      const bool write = *score_cmd && !flags.dry_run;
      const auto report = score_experiment(config, write);
      out << metrics::format_report(report);
      if (flags.dry_run) out << "nothing written\n";
      return kExitOk;
    }
    if (*simulate_cmd) {
      if (!config.simulate) throw ConfigError("config has no 'simulate' block");
      const auto rows = simulate_sweep(*config.simulate, config.global_seed);
      std::string csv = "x,fact_prob,empirical,predicted\n";
      std::vector<metrics::CurvePoint> points;
      for (const auto& r : rows) {
        csv += fmt::format("{:.4f},{:.6f},{:.6f},{:.6f}\n", r.x, r.fact_prob, r.empirical, r.predicted);
        points.push_back({r.x, r.empirical});
      }
      out << csv;
      if (config.simulate->hops == 1) {
        try {
          const auto fit = metrics::fit_attention_curve(points);
          out << fmt::format("fit: alpha={:.6f} gamma={:.6f} sse={:.3g}\n", fit.alpha_hat, fit.gamma_hat,
                             fit.residual_sse);
        } catch (const DomainError& e) {
          out << fmt::format("fit: {}\n", e.what());
        }
      }
      if (flags.dry_run) {
        out << "nothing written\n";
      } else {
        std::filesystem::create_directories(config.experiment_dir());
        write_text_atomic(config.experiment_dir() / "simulate.csv", csv);
      }
      return kExitOk;
    }
    if (*granularity_cmd) {
      const StrategySpec* ssrp = nullptr;
      for (const auto& s : config.strategies) {
        if (s.kind == strategy::Strategy::ssrp) {
          ssrp = &s;
          break;
        }
      }
      if (ssrp == nullptr) throw ConfigError("ablate granularity needs an ssrp strategy in the config");
      auto c = ablation_config(config, "granularity", forge::Tier::hijack);
      c.strategies.clear();
      for (auto tier : {strategy::GranularityTier::hyper_compressed, strategy::GranularityTier::optimal,
                        strategy::GranularityTier::verbose}) {
        StrategySpec s = *ssrp;
        s.granularity = tier;
        s.label = fmt::format("ssrp_{}", strategy::to_string(tier));
        c.strategies.push_back(std::move(s));
      }
      c.baseline = "ssrp_optimal";
      if (flags.dry_run) {
        print_plan(out, c, "ablate granularity");
        return kExitOk;
      }
      return full_cycle(c, flags, out);
    }
    if (*equidistant_cmd) {
      const auto* vanilla = config.find_strategy("vanilla");
      if (vanilla == nullptr) {
        for (const auto& s : config.strategies) {
          if (s.kind == strategy::Strategy::vanilla) vanilla = &s;
        }
      }
      if (vanilla == nullptr) throw ConfigError("ablate equidistant needs a vanilla strategy in the config");
      auto c = ablation_config(config, "equidistant", forge::Tier::equidistant);
      c.strategies = {*vanilla};
      c.baseline = vanilla->label;
      if (flags.dry_run) {
        print_plan(out, c, "ablate equidistant");
        return kExitOk;
      }
      return full_cycle(c, flags, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const LedgerError& e) {
    err << "ledger error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  err << app.help();
  return kExitConfig;
}

}  // namespace latchbench::orchestrator
