#include "latchbench/backend/rule_judge.hpp"

#include "latchbench/core/text.hpp"
#include "latchbench/strategy/prompts.hpp"

namespace latchbench::backend {

const std::vector<std::string>& contradiction_table() {
  static const std::vector<std::string> table = {"original request", "disregard the update", "ignore the update",
                                                 "keep the original", "as originally requested"};
  return table;
}

bool RuleJudgeBackend::decide(const std::string& response, const std::string& update) {
  const auto res = text::fold(response);
  const auto upd = text::fold(update);
  if (upd.empty() || res.find(upd) == std::string::npos) return false;
  for (const auto& phrase : contradiction_table()) {
    if (res.find(phrase) != std::string::npos) return false;
  }
  return true;
}

Completion RuleJudgeBackend::do_complete(std::span<const ChatMessage> messages, const CompletionParams&,
                                         const CallContext&) {
  const auto prompt = last_user_message(messages);
  Completion out;
  const auto parts = strategy::parse_judge_prompt(prompt);
  out.text = parts && decide(parts->first, parts->second) ? "1" : "0";
  out.usage.completion_tokens = 1;
  return out;
}

}  // namespace latchbench::backend
