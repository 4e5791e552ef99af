#include "latchbench/backend/factory.hpp"

#include <fmt/core.h>

#include "latchbench/backend/rule_judge.hpp"
#include "latchbench/backend/scripted.hpp"
#include "latchbench/backend/synthetic.hpp"

namespace latchbench::backend {

BackendDescriptor descriptor_from_json(const json& j, const std::filesystem::path& base_dir) {
  BackendDescriptor d;
  try {
    d.id = j.at("id").get<std::string>();
    d.kind = backend_kind_from_string(j.at("kind").get<std::string>());
    d.endpoint = j.value("endpoint", "");
    d.model = j.value("model", "");
    d.api_key_env = j.value("api_key_env", "");
    if (j.contains("headers")) d.headers = j["headers"].get<std::map<std::string, std::string>>();
    d.max_concurrency = j.value("max_concurrency", d.max_concurrency);
    d.rate_per_second = j.value("rate_per_second", d.rate_per_second);
    d.burst = j.value("burst", d.burst);
    if (j.contains("retry")) {
      const auto& r = j["retry"];
      d.retry.max_attempts = r.value("max_attempts", d.retry.max_attempts);
      d.retry.base_delay = std::chrono::milliseconds(r.value("base_delay_ms", d.retry.base_delay.count()));
      d.retry.max_delay = std::chrono::milliseconds(r.value("max_delay_ms", d.retry.max_delay.count()));
      d.retry.factor = r.value("factor", d.retry.factor);
      d.retry.jitter = r.value("jitter", d.retry.jitter);
    }
    if (j.contains("fixture")) {
      d.fixture = j["fixture"].get<std::string>();
      if (d.fixture.is_relative() && !base_dir.empty()) d.fixture = base_dir / d.fixture;
    }
    if (j.contains("simulator")) d.simulator = sim::simulator_config_from_json(j["simulator"]);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("backend descriptor: {}", e.what()));
  }
  if (d.id.empty()) throw ConfigError("backend descriptor: empty id");
  if (d.kind == BackendKind::remote) {
    if (d.endpoint.empty()) throw ConfigError(fmt::format("remote backend {} needs an endpoint", d.id));
    if (d.api_key_env.empty()) throw ConfigError(fmt::format("remote backend {} needs api_key_env", d.id));
    if (j.contains("api_key")) throw ConfigError("credentials must come from the environment, not the config");
  }
  if (d.kind == BackendKind::scripted && d.fixture.empty()) {
    throw ConfigError(fmt::format("scripted backend {} needs a fixture", d.id));
  }
  if (d.retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
  return d;
}

json to_json(const BackendDescriptor& d) {
  json j = {{"id", d.id}, {"kind", to_string(d.kind)}};
  switch (d.kind) {
    case BackendKind::remote:
      j["endpoint"] = d.endpoint;
      j["model"] = d.model;
      j["api_key_env"] = d.api_key_env;
      j["headers"] = d.headers;
      j["max_concurrency"] = d.max_concurrency;
      j["rate_per_second"] = d.rate_per_second;
      j["burst"] = d.burst;
      j["retry"] = {{"max_attempts", d.retry.max_attempts},
                    {"base_delay_ms", d.retry.base_delay.count()},
                    {"max_delay_ms", d.retry.max_delay.count()},
                    {"factor", d.retry.factor},
                    {"jitter", d.retry.jitter}};
      break;
    case BackendKind::scripted: j["fixture"] = d.fixture.string(); break;
    case BackendKind::synthetic: j["simulator"] = sim::to_json(d.simulator); break;
    case BackendKind::rule: break;
  }
  return j;
}

std::unique_ptr<CompletionBackend> make_backend(const BackendDescriptor& d) {
  switch (d.kind) {
    case BackendKind::remote: {
      RemoteOptions o;
      o.base_url = d.endpoint;
      o.model = d.model;
      o.api_key_env = d.api_key_env;
      o.headers = d.headers;
      o.retry = d.retry;
      o.max_concurrency = d.max_concurrency;
      o.rate_per_second = d.rate_per_second;
      o.burst = d.burst;
      return std::make_unique<RemoteBackend>(d.id, std::move(o));
    }
    case BackendKind::scripted: return std::make_unique<ScriptedBackend>(d.id, load_scripted_fixture(d.fixture));
    case BackendKind::synthetic: return std::make_unique<SyntheticBackend>(d.id, d.simulator);
    case BackendKind::rule: return std::make_unique<RuleJudgeBackend>(d.id);
  }
  throw ConfigError("unknown backend kind");
}

}  // namespace latchbench::backend
