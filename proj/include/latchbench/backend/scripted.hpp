#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "latchbench/backend/backend.hpp"

namespace latchbench::backend {

struct ScriptedRule {
  std::string match_prefix;
  std::string response;
};

/// Fixture file: JSON list of {"match_prefix": string, "response": string}.
std::vector<ScriptedRule> load_scripted_fixture(const std::filesystem::path& path);
json to_json(const std::vector<ScriptedRule>& rules);

/// Deterministic responder. The last user message is matched against every
/// rule; the longest matching prefix wins (first in file order on ties). No
/// match raises BackendError(pattern_miss) naming the prompt's hash.
class ScriptedBackend final : public CompletionBackend {
 public:
  ScriptedBackend(std::string id, std::vector<ScriptedRule> rules);

 protected:
  Completion do_complete(std::span<const ChatMessage> messages, const CompletionParams& params,
                         const CallContext& context) override;

 private:
  std::vector<ScriptedRule> rules_;
};

}  // namespace latchbench::backend
