#pragma once

#include <chrono>
#include <condition_variable>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "latchbench/backend/backend.hpp"

namespace latchbench::backend {

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;
  std::chrono::milliseconds max_delay{60'000};
  bool jitter = true;
};

/// Delay before retry number `attempt` (1-based): base * factor^(attempt-1),
/// capped at max_delay; with jitter the value is scaled by a uniform draw in
/// [0.5, 1.0].
std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int attempt, double jitter_draw = 1.0);

/// Parses "retry-after-ms" (milliseconds) or "retry-after" (seconds).
std::optional<std::chrono::milliseconds> parse_retry_after(const std::map<std::string, std::string>& headers);

/// Status codes worth another attempt: 408, 409, 429 and 5xx.
bool is_retryable_status(int status);

struct RemoteOptions {
  std::string base_url;  // e.g. "https://api.example.com/v1"
  std::string model;
  std::string api_key_env;  // name of the environment variable holding the key
  std::map<std::string, std::string> headers;
  RetryPolicy retry;
  int max_concurrency = 4;
  double rate_per_second = 0.0;  // 0 disables the token bucket
  double burst = 1.0;
  std::chrono::seconds timeout{120};
};

/// Token-bucket limiter; acquire() blocks until a token is available.
class TokenBucket {
 public:
  TokenBucket(double rate_per_second, double burst);
  void acquire();

 private:
  std::mutex mu_;
  double rate_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

/// OpenAI-style chat-completion client:
/// {"model","messages","temperature","max_tokens"} -> {"choices":[{"message":{"content"}}]}.
class RemoteBackend final : public CompletionBackend {
 public:
  RemoteBackend(std::string id, RemoteOptions options);

  /// JSON body sent for `messages`.
  static json request_body(std::span<const ChatMessage> messages, const CompletionParams& params,
                           const std::string& default_model);

  /// Extracts choices[0].message.content and usage counts.
  static Completion parse_response(const std::string& body, std::span<const ChatMessage> messages);

 protected:
  Completion do_complete(std::span<const ChatMessage> messages, const CompletionParams& params,
                         const CallContext& context) override;

 private:
  class Slot;

  RemoteOptions options_;
  std::string scheme_host_port_;
  std::string path_;
  std::mutex slots_mu_;
  std::condition_variable slots_cv_;
  int in_flight_ = 0;
  std::optional<TokenBucket> bucket_;
};

}  // namespace latchbench::backend
