#include "latchbench/orchestrator/config.hpp"

#include <fmt/core.h>

#include <set>

#include "latchbench/core/text.hpp"

namespace latchbench::orchestrator {

json StrategySpec::to_json() const {
  json j = {{"label", label}, {"kind", strategy::to_string(kind)}};
  if (backend) j["backend"] = backend::to_json(*backend);
  if (architect) j["architect"] = backend::to_json(*architect);
  if (executive) j["executive"] = backend::to_json(*executive);
  if (kind == strategy::Strategy::ssrp) j["granularity"] = strategy::to_string(granularity);
  return j;
}

std::vector<std::string> RunConfig::strategy_labels() const {
  std::vector<std::string> out;
  for (const auto& s : strategies) out.push_back(s.label);
  return out;
}

const StrategySpec* RunConfig::find_strategy(std::string_view label) const {
  for (const auto& s : strategies) {
    if (s.label == label) return &s;
  }
  return nullptr;
}

bool is_filesystem_safe(std::string_view id) {
  if (id.empty() || id == "." || id == "..") return false;
  for (char c : id) {
    if (!(text::is_word_char(c) || c == '-' || c == '.')) return false;
  }
  return true;
}

namespace {

backend::BackendDescriptor descriptor(const json& j, const json& retry, const std::filesystem::path& base_dir,
                                      const std::string& where) {
  if (!j.is_object()) throw ConfigError(fmt::format("{}: backend descriptor must be an object", where));
  json copy = j;
  if (!copy.contains("retry") && !retry.is_null()) copy["retry"] = retry;
  try {
    return backend::descriptor_from_json(copy, base_dir);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", where, e.what()));
  }
}

}  // namespace

RunConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() ? base_dir / path : path;
  };
  try {
    c.experiment_id = j.at("experiment_id").get<std::string>();
    c.global_seed = j.value("global_seed", std::uint64_t{0});
    if (j.contains("corpus")) c.corpus = resolve(j["corpus"].get<std::string>());
    if (j.contains("limit") && !j["limit"].is_null()) c.limit = j["limit"].get<std::size_t>();
    c.ablation_limit = j.value("ablation_limit", c.ablation_limit);
    c.model_pair = j.value("model_pair", c.model_pair);
    for (const auto& t : j.value("tiers", json::array())) {
      TierSpec spec;
      spec.tier = forge::tier_from_string(t.at("tier").get<std::string>());
      const auto fallback = spec.tier == forge::Tier::shallow ? forge::kShallowBudget : forge::kStressBudget;
      spec.budget = t.value("budget", fallback);
      c.tiers.push_back(spec);
    }
    c.update_mode = forge::update_mode_from_string(j.value("update_mode", "templated"));
    const json retry = j.value("retry", json());
    if (j.contains("update_backend")) c.update_backend = descriptor(j["update_backend"], retry, base_dir, "update_backend");
    c.forge.chars_per_token = j.value("chars_per_token", forge::kDefaultCharsPerToken);
    if (j.contains("forge")) {
      const auto& f = j["forge"];
      c.forge.hijack_fact_fractions = f.value("hijack_fact_fractions", c.forge.hijack_fact_fractions);
      c.forge.decoy_fractions = f.value("decoy_fractions", c.forge.decoy_fractions);
    }
    for (const auto& s : j.at("strategies")) {
      StrategySpec spec;
      spec.kind = strategy::strategy_from_string(s.at("kind").get<std::string>());
      spec.label = s.value("label", std::string(strategy::to_string(spec.kind)));
      const auto where = fmt::format("strategy '{}'", spec.label);
      if (spec.kind == strategy::Strategy::ssrp) {
        if (!s.contains("architect") || !s.contains("executive")) {
          throw ConfigError(fmt::format("{}: ssrp needs architect and executive backends", where));
        }
        spec.architect = descriptor(s["architect"], retry, base_dir, where + " architect");
        spec.executive = descriptor(s["executive"], retry, base_dir, where + " executive");
        spec.granularity = strategy::granularity_from_string(s.value("granularity", "optimal"));
      } else {
        if (!s.contains("backend")) throw ConfigError(fmt::format("{}: missing backend", where));
        spec.backend = descriptor(s["backend"], retry, base_dir, where);
      }
      c.strategies.push_back(std::move(spec));
    }
    c.judge = descriptor(j.value("judge", json{{"id", "rule-judge"}, {"kind", "rule"}}), retry, base_dir, "judge");
    c.baseline = j.value("baseline", c.baseline);
    c.parallelism = j.value("parallelism", std::size_t{1});
    c.output_dir = resolve(j.value("output_dir", std::string("out")));
    if (j.contains("executive_history_window") && !j["executive_history_window"].is_null()) {
      c.executive_history_window = j["executive_history_window"].get<std::size_t>();
    }
    if (j.contains("simulate")) {
      const auto& s = j["simulate"];
      SimulateSpec spec;
      spec.simulator = sim::simulator_config_from_json(s.value("simulator", json::object()));
      spec.x_grid = s.value("x_grid", spec.x_grid);
      spec.hops = s.value("hops", spec.hops);
      spec.n = s.value("n", spec.n);
      spec.p_g1 = s.value("p_g1", spec.p_g1);
      spec.p_g2 = s.value("p_g2", spec.p_g2);
      if (spec.hops == 0 || spec.n == 0) throw ConfigError("simulate: hops and n must be >= 1");
      for (double x : spec.x_grid) {
        if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("simulate: x_grid values must lie in [0,1]");
      }
      c.simulate = spec;
    }
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  } catch (const FormatError& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  }

  if (!is_filesystem_safe(c.experiment_id)) {
    throw ConfigError(fmt::format("experiment_id '{}' is not filesystem-safe (use letters, digits, '-', '_', '.')",
                                  c.experiment_id));
  }
  if (c.parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (c.forge.chars_per_token < 1) throw ConfigError("chars_per_token must be >= 1");
  std::set<std::string> labels;
  for (const auto& s : c.strategies) {
    if (!is_filesystem_safe(s.label)) throw ConfigError(fmt::format("strategy label '{}' is not filesystem-safe", s.label));
    if (!labels.insert(s.label).second) throw ConfigError(fmt::format("duplicate strategy label '{}'", s.label));
  }
  std::set<forge::Tier> tiers;
  for (const auto& t : c.tiers) {
    if (!tiers.insert(t.tier).second) throw ConfigError(fmt::format("tier {} listed twice", forge::to_string(t.tier)));
    if (t.budget == 0) throw ConfigError("tier budget must be > 0");
  }
  if (c.update_mode == forge::UpdateMode::dynamic && !c.update_backend) {
    throw ConfigError("update_mode 'dynamic' needs update_backend");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError(fmt::format("config file {} not found", path.string()));
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config {}: {}", path.string(), e.what()));
  }
  return config_from_json(j, path.parent_path());
}

void check_launch_paths(const RunConfig& config) {
  if (config.corpus.empty()) throw ConfigError("config has no corpus path");
  if (!std::filesystem::exists(config.corpus)) {
    throw ConfigError(fmt::format("corpus {} does not exist", config.corpus.string()));
  }
  auto check = [](const std::optional<backend::BackendDescriptor>& d) {
    if (d && d->kind == backend::BackendKind::scripted && !std::filesystem::exists(d->fixture)) {
      throw ConfigError(fmt::format("fixture {} for backend {} does not exist", d->fixture.string(), d->id));
    }
  };
  for (const auto& s : config.strategies) {
    check(s.backend);
    check(s.architect);
    check(s.executive);
  }
  check(std::optional<backend::BackendDescriptor>(config.judge));
  check(config.update_backend);
}

}  // namespace latchbench::orchestrator
