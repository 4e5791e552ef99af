#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latchbench/core/error.hpp"
#include "latchbench/core/jsonl.hpp"

namespace latchbench::forge {
struct Trajectory;
}
namespace latchbench::strategy {
struct Protocol;
enum class GranularityTier : int;
}  // namespace latchbench::strategy

namespace latchbench::backend {

enum class Role { system, user, assistant };

std::string_view to_string(Role r);
Role role_from_string(std::string_view s);

struct ChatMessage {
  Role role = Role::user;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

json to_json(const ChatMessage& m);
ChatMessage chat_message_from_json(const json& j);
json to_json(std::span<const ChatMessage> messages);
std::vector<ChatMessage> messages_from_json(const json& j);

/// Throws DomainError if a user or assistant message has empty content.
void validate_messages(std::span<const ChatMessage> messages);

struct CompletionParams {
  double temperature = 0.0;
  int max_output_tokens = 1024;
  std::string model_id;
};

struct Usage {
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  bool estimated = true;
};

struct Completion {
  std::string text;
  Usage usage;
};

/// Which step of a strategy issues the call. Remote and scripted backends
/// ignore it; the synthetic backend uses it together with the trajectory.
enum class CallRole { vanilla, architect, executive, reflexion_draft, reflexion_critique, judge, update };

std::string_view to_string(CallRole r);

struct CallContext {
  CallRole role = CallRole::vanilla;
  std::uint64_t seed = 0;
  const forge::Trajectory* trajectory = nullptr;
  const strategy::Protocol* protocol = nullptr;
  std::optional<strategy::GranularityTier> tier;
};

enum class BackendKind { remote, scripted, synthetic, rule };

std::string_view to_string(BackendKind k);
BackendKind backend_kind_from_string(std::string_view s);

class BackendError : public Error {
 public:
  enum class Kind { exhausted, pattern_miss, auth, request, unsupported, malformed_response };

  BackendError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(BackendError::Kind k);

struct CounterSnapshot {
  std::uint64_t calls = 0;
  std::uint64_t retries = 0;
  std::uint64_t failures = 0;
};

/// Uniform completion interface. Implementations must tolerate concurrent
/// complete() calls.
class CompletionBackend {
 public:
  CompletionBackend(std::string id, BackendKind kind) : id_(std::move(id)), kind_(kind) {}
  virtual ~CompletionBackend() = default;

  CompletionBackend(const CompletionBackend&) = delete;
  CompletionBackend& operator=(const CompletionBackend&) = delete;

  /// Counts the call, delegates to do_complete, and counts failures.
  Completion complete(std::span<const ChatMessage> messages, const CompletionParams& params,
                      const CallContext& context = {});

  const std::string& id() const { return id_; }
  BackendKind kind() const { return kind_; }
  CounterSnapshot counters() const;

 protected:
  virtual Completion do_complete(std::span<const ChatMessage> messages, const CompletionParams& params,
                                 const CallContext& context) = 0;

  void count_retry() { retries_.fetch_add(1, std::memory_order_relaxed); }

 private:
  std::string id_;
  BackendKind kind_;
  std::atomic<std::uint64_t> calls_{0};
  std::atomic<std::uint64_t> retries_{0};
  std::atomic<std::uint64_t> failures_{0};
};

/// Content of the last user message, or empty if there is none.
std::string_view last_user_message(std::span<const ChatMessage> messages);

}  // namespace latchbench::backend
