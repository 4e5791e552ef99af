#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "latchbench/backend/factory.hpp"
#include "latchbench/forge/builders.hpp"
#include "latchbench/forge/update.hpp"
#include "latchbench/strategy/protocol.hpp"
#include "latchbench/strategy/run_record.hpp"

namespace latchbench::orchestrator {

struct TierSpec {
  forge::Tier tier = forge::Tier::shallow;
  std::size_t budget = 0;
};

struct StrategySpec {
  std::string label;
  strategy::Strategy kind = strategy::Strategy::vanilla;
  std::optional<backend::BackendDescriptor> backend;    // vanilla, reflexion
  std::optional<backend::BackendDescriptor> architect;  // ssrp
  std::optional<backend::BackendDescriptor> executive;  // ssrp
  strategy::GranularityTier granularity = strategy::GranularityTier::optimal;

  json to_json() const;
};

struct SimulateSpec {
  sim::SimulatorConfig simulator;
  std::vector<double> x_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::size_t hops = 1;
  std::size_t n = 10000;
  double p_g1 = 0.0;
  double p_g2 = 1.0;
};

/// Declarative experiment description. Keys:
///   experiment_id, global_seed, corpus, limit, ablation_limit, model_pair,
///   tiers [{tier, budget}], update_mode, update_backend, chars_per_token,
///   forge {hijack_fact_fractions, decoy_fractions},
///   strategies [{label, kind, backend | architect + executive, granularity}],
///   judge, baseline, parallelism, retry, output_dir,
///   executive_history_window, simulate {...}
/// Relative paths resolve against the config file's directory.
struct RunConfig {
  std::string experiment_id;
  std::uint64_t global_seed = 0;
  std::filesystem::path corpus;
  std::optional<std::size_t> limit;
  std::size_t ablation_limit = 50;
  std::string model_pair = "default";
  std::vector<TierSpec> tiers;
  forge::UpdateMode update_mode = forge::UpdateMode::templated;
  std::optional<backend::BackendDescriptor> update_backend;
  forge::ForgeOptions forge;
  std::vector<StrategySpec> strategies;
  backend::BackendDescriptor judge;
  std::string baseline = "vanilla";
  std::size_t parallelism = 1;
  std::filesystem::path output_dir;
  std::optional<std::size_t> executive_history_window;
  std::optional<SimulateSpec> simulate;

  std::filesystem::path experiment_dir() const { return output_dir / experiment_id; }
  std::vector<std::string> strategy_labels() const;
  const StrategySpec* find_strategy(std::string_view label) const;
};

/// Parses and validates. Throws ConfigError naming the offending key.
RunConfig config_from_json(const json& j, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// Checks that referenced input paths exist (corpus, fixtures).
void check_launch_paths(const RunConfig& config);

bool is_filesystem_safe(std::string_view id);

}  // namespace latchbench::orchestrator
