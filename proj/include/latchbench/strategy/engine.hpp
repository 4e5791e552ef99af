#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latchbench/backend/backend.hpp"
#include "latchbench/forge/trajectory.hpp"
#include "latchbench/strategy/protocol.hpp"
#include "latchbench/strategy/run_record.hpp"

namespace latchbench::strategy {

struct StrategyOptions {
  backend::CompletionParams params;
  /// Keep only the last N history turns in the Executive prompt.
  std::optional<std::size_t> executive_history_window;
  std::string model_pair;
  std::string label;  // defaults to the strategy name
};

/// System prompt followed by the assembled turns: customer turns become user
/// messages, agent turns, logs and notices become assistant messages.
std::vector<backend::ChatMessage> render_history(const forge::Trajectory& t, std::string_view system_prompt,
                                                 std::optional<std::size_t> window = std::nullopt);

/// Prompts and responses of the calls made so far, in order.
struct CallTrace {
  std::vector<std::vector<backend::ChatMessage>> prompts;
  std::vector<std::string> responses;
  int repair_calls = 0;
};

/// A strategy stage failed; `stage()` names it.
class StageError : public Error {
 public:
  StageError(std::string stage, std::string kind, const std::string& message)
      : Error(message), stage_(std::move(stage)), kind_(std::move(kind)) {}

  const std::string& stage() const { return stage_; }
  const std::string& kind() const { return kind_; }

 private:
  std::string stage_;
  std::string kind_;
};

AgentRunRecord run_vanilla(const forge::Trajectory& t, backend::CompletionBackend& backend, std::uint64_t seed,
                           const StrategyOptions& options = {});

/// One corrective re-prompt on a parse failure or contract violation, then
/// ProtocolError.
Protocol synthesize_protocol(backend::CompletionBackend& architect, const forge::Trajectory& t, GranularityTier tier,
                             std::uint64_t seed, const StrategyOptions& options = {}, CallTrace* trace = nullptr);

std::string execute_protocol(backend::CompletionBackend& executive, const Protocol& protocol,
                             const forge::Trajectory& t, std::uint64_t seed, const StrategyOptions& options = {},
                             CallTrace* trace = nullptr);

AgentRunRecord run_ssrp(const forge::Trajectory& t, backend::CompletionBackend& architect,
                        backend::CompletionBackend& executive, GranularityTier tier, std::uint64_t seed,
                        const StrategyOptions& options = {});

AgentRunRecord run_reflexion(const forge::Trajectory& t, backend::CompletionBackend& backend, std::uint64_t seed,
                             const StrategyOptions& options = {});

}  // namespace latchbench::strategy
