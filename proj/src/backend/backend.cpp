#include "latchbench/backend/backend.hpp"

#include <fmt/core.h>

#include "latchbench/core/text.hpp"

namespace latchbench::backend {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "?";
}

Role role_from_string(std::string_view s) {
  if (s == "system") return Role::system;
  if (s == "user") return Role::user;
  if (s == "assistant") return Role::assistant;
  throw FormatError(fmt::format("unknown chat role '{}'", s));
}

json to_json(const ChatMessage& m) { return {{"role", to_string(m.role)}, {"content", m.content}}; }

ChatMessage chat_message_from_json(const json& j) {
  return {role_from_string(j.at("role").get<std::string>()), j.at("content").get<std::string>()};
}

json to_json(std::span<const ChatMessage> messages) {
  json arr = json::array();
  for (const auto& m : messages) arr.push_back(to_json(m));
  return arr;
}

std::vector<ChatMessage> messages_from_json(const json& j) {
  std::vector<ChatMessage> out;
  for (const auto& m : j) out.push_back(chat_message_from_json(m));
  return out;
}

void validate_messages(std::span<const ChatMessage> messages) {
  for (const auto& m : messages) {
    if (m.role != Role::system && text::trim(m.content).empty()) {
      throw DomainError(fmt::format("{} message with empty content", to_string(m.role)));
    }
  }
}

std::string_view to_string(CallRole r) {
  switch (r) {
    case CallRole::vanilla: return "vanilla";
    case CallRole::architect: return "architect";
    case CallRole::executive: return "executive";
    case CallRole::reflexion_draft: return "reflexion_draft";
    case CallRole::reflexion_critique: return "reflexion_critique";
    case CallRole::judge: return "judge";
    case CallRole::update: return "update";
  }
  return "?";
}

std::string_view to_string(BackendKind k) {
  switch (k) {
    case BackendKind::remote: return "remote";
    case BackendKind::scripted: return "scripted";
    case BackendKind::synthetic: return "synthetic";
    case BackendKind::rule: return "rule";
  }
  return "?";
}

BackendKind backend_kind_from_string(std::string_view s) {
  if (s == "remote") return BackendKind::remote;
  if (s == "scripted") return BackendKind::scripted;
  if (s == "synthetic") return BackendKind::synthetic;
  if (s == "rule") return BackendKind::rule;
  throw ConfigError(fmt::format("unknown backend kind '{}'", s));
}

std::string_view to_string(BackendError::Kind k) {
  switch (k) {
    case BackendError::Kind::exhausted: return "exhausted";
    case BackendError::Kind::pattern_miss: return "pattern_miss";
    case BackendError::Kind::auth: return "auth";
    case BackendError::Kind::request: return "request";
    case BackendError::Kind::unsupported: return "unsupported";
    case BackendError::Kind::malformed_response: return "malformed_response";
  }
  return "?";
}

Completion CompletionBackend::complete(std::span<const ChatMessage> messages, const CompletionParams& params,
                                       const CallContext& context) {
  calls_.fetch_add(1, std::memory_order_relaxed);
  try {
    validate_messages(messages);
    return do_complete(messages, params, context);
  } catch (...) {
    failures_.fetch_add(1, std::memory_order_relaxed);
    throw;
  }
}

CounterSnapshot CompletionBackend::counters() const {
  return {calls_.load(std::memory_order_relaxed), retries_.load(std::memory_order_relaxed),
          failures_.load(std::memory_order_relaxed)};
}

std::string_view last_user_message(std::span<const ChatMessage> messages) {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == Role::user) return it->content;
  }
  return {};
}

}  // namespace latchbench::backend
