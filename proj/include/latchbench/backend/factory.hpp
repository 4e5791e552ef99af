#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "latchbench/backend/backend.hpp"
#include "latchbench/backend/remote.hpp"
#include "latchbench/sim/latch.hpp"

namespace latchbench::backend {

/// Declarative backend description as it appears in a run config:
///   {"id", "kind": "remote"|"scripted"|"synthetic"|"rule",
///    "endpoint", "model", "api_key_env", "headers", "max_concurrency",
///    "rate_per_second", "burst", "retry": {"max_attempts","base_delay_ms","factor","jitter"},
///    "fixture", "simulator": {...}}
/// Credentials never appear here, only the name of the environment variable.
struct BackendDescriptor {
  std::string id;
  BackendKind kind = BackendKind::synthetic;
  std::string endpoint;
  std::string model;
  std::string api_key_env;
  std::map<std::string, std::string> headers;
  int max_concurrency = 4;
  double rate_per_second = 0.0;
  double burst = 1.0;
  RetryPolicy retry;
  std::filesystem::path fixture;
  sim::SimulatorConfig simulator;
};

/// Relative fixture paths are resolved against `base_dir`. Throws ConfigError
/// on a missing or inconsistent field.
BackendDescriptor descriptor_from_json(const json& j, const std::filesystem::path& base_dir = {});
json to_json(const BackendDescriptor& d);

std::unique_ptr<CompletionBackend> make_backend(const BackendDescriptor& d);

}  // namespace latchbench::backend
