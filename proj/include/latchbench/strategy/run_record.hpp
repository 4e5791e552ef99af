#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latchbench/backend/backend.hpp"
#include "latchbench/strategy/protocol.hpp"

namespace latchbench::strategy {

enum class Strategy { vanilla, ssrp, reflexion };

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

struct RunError {
  std::string stage;  // vanilla | architect | executive | draft | critique
  std::string kind;   // backend error kind or "protocol"
  std::string message;

  friend bool operator==(const RunError&, const RunError&) = default;
};

struct AgentRunRecord {
  std::string trajectory_id;
  Strategy strategy = Strategy::vanilla;
  std::string label;  // strategy variant name; store key together with trajectory_id
  std::string primary_backend;
  std::optional<std::string> secondary_backend;
  std::vector<std::vector<backend::ChatMessage>> prompts;
  std::vector<std::string> responses;
  std::string final_response;
  std::optional<Protocol> protocol;
  int call_count = 0;
  int repair_calls = 0;
  std::int64_t wall_time_ms = 0;  // not serialized; the ledger keeps timings
  std::optional<RunError> error;
  std::string prompt_version;
  std::uint64_t seed = 0;
  std::string tier;
  std::string model_pair;
  std::optional<std::string> granularity;

  std::string key() const { return trajectory_id + "|" + label; }

  friend bool operator==(const AgentRunRecord&, const AgentRunRecord&) = default;
};

/// Prompt arrays whose serialized form exceeds this go to the blob directory.
inline constexpr std::size_t kBlobThresholdBytes = 64 * 1024;

/// Serializes a record. When `blob_dir` is set, oversized prompt arrays are
/// written to <blob_dir>/<sha256>.json and replaced by {"blob": "<sha256>"}.
json to_json(const AgentRunRecord& r, const std::optional<std::filesystem::path>& blob_dir = std::nullopt);

/// Inverse of to_json; blob references are resolved against `blob_dir`.
AgentRunRecord run_record_from_json(const json& j,
                                    const std::optional<std::filesystem::path>& blob_dir = std::nullopt);

}  // namespace latchbench::strategy
