#pragma once

#include <string>
#include <vector>

#include "latchbench/backend/backend.hpp"

namespace latchbench::backend {

/// Phrases that mark a response as reaffirming the original request.
const std::vector<std::string>& contradiction_table();

/// Offline judge. It reads the response and the update back out of the judge
/// prompt and answers "1" iff the folded response contains the folded update
/// and no contradiction-table phrase. Prompts it cannot parse yield "0".
class RuleJudgeBackend final : public CompletionBackend {
 public:
  explicit RuleJudgeBackend(std::string id) : CompletionBackend(std::move(id), BackendKind::rule) {}

  static bool decide(const std::string& response, const std::string& update);

 protected:
  Completion do_complete(std::span<const ChatMessage> messages, const CompletionParams& params,
                         const CallContext& context) override;
};

}  // namespace latchbench::backend
