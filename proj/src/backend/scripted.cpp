#include "latchbench/backend/scripted.hpp"

#include <fmt/core.h>

#include "latchbench/core/hash.hpp"
#include "latchbench/core/text.hpp"
#include "latchbench/forge/tokens.hpp"

namespace latchbench::backend {

std::vector<ScriptedRule> load_scripted_fixture(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
  }
  if (!j.is_array()) throw FormatError(fmt::format("{}: scripted fixture must be a JSON list", path.string()));
  std::vector<ScriptedRule> rules;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& r = j[i];
    if (!r.is_object() || !r.contains("match_prefix") || !r["match_prefix"].is_string() || !r.contains("response") ||
        !r["response"].is_string()) {
      throw FormatError(fmt::format("{}: entry {} needs string match_prefix and response", path.string(), i + 1));
    }
    rules.push_back({r["match_prefix"].get<std::string>(), r["response"].get<std::string>()});
  }
  return rules;
}

json to_json(const std::vector<ScriptedRule>& rules) {
  json arr = json::array();
  for (const auto& r : rules) arr.push_back({{"match_prefix", r.match_prefix}, {"response", r.response}});
  return arr;
}

ScriptedBackend::ScriptedBackend(std::string id, std::vector<ScriptedRule> rules)
    : CompletionBackend(std::move(id), BackendKind::scripted), rules_(std::move(rules)) {}

Completion ScriptedBackend::do_complete(std::span<const ChatMessage> messages, const CompletionParams&,
                                        const CallContext&) {
  const auto prompt = last_user_message(messages);
  const ScriptedRule* best = nullptr;
  for (const auto& rule : rules_) {
    if (text::starts_with(prompt, rule.match_prefix) &&
        (best == nullptr || rule.match_prefix.size() > best->match_prefix.size())) {
      best = &rule;
    }
  }
  if (best == nullptr) {
    throw BackendError(BackendError::Kind::pattern_miss,
                       fmt::format("scripted backend {}: no pattern matches prompt sha256:{}", id(),
                                   sha256_hex(prompt).substr(0, 16)));
  }
  std::size_t prompt_tokens = 0;
  for (const auto& m : messages) prompt_tokens += forge::estimate_tokens(m.content);
  return {best->response, {prompt_tokens, forge::estimate_tokens(best->response), true}};
}

}  // namespace latchbench::backend
