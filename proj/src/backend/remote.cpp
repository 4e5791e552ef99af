#include "latchbench/backend/remote.hpp"

#include <httplib.h>

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include "latchbench/core/text.hpp"
#include "latchbench/forge/tokens.hpp"

namespace latchbench::backend {

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int attempt, double jitter_draw) {
  const double raw = static_cast<double>(policy.base_delay.count()) * std::pow(policy.factor, attempt - 1);
  double capped = std::min(raw, static_cast<double>(policy.max_delay.count()));
  if (policy.jitter) capped *= 0.5 + 0.5 * std::clamp(jitter_draw, 0.0, 1.0);
  return std::chrono::milliseconds(static_cast<long long>(capped));
}

std::optional<std::chrono::milliseconds> parse_retry_after(const std::map<std::string, std::string>& headers) {
  auto find = [&](std::string_view key) -> std::optional<std::string> {
    for (const auto& [name, value] : headers) {
      if (text::to_lower(name) == key) return value;
    }
    return std::nullopt;
  };
  auto parse = [](const std::string& v, double scale) -> std::optional<std::chrono::milliseconds> {
    char* end = nullptr;
    const double parsed = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || std::isnan(parsed)) return std::nullopt;
    return std::chrono::milliseconds(static_cast<long long>(std::max(0.0, parsed) * scale));
  };
  if (auto ms = find("retry-after-ms")) {
    if (auto d = parse(*ms, 1.0)) return d;
  }
  if (auto s = find("retry-after")) {
    if (auto d = parse(*s, 1000.0)) return d;
  }
  return std::nullopt;
}

bool is_retryable_status(int status) { return status == 408 || status == 409 || status == 429 || status >= 500; }

TokenBucket::TokenBucket(double rate_per_second, double burst)
    : rate_(rate_per_second), capacity_(std::max(1.0, burst)), tokens_(capacity_), last_(std::chrono::steady_clock::now()) {}

void TokenBucket::acquire() {
  std::unique_lock lock(mu_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_);
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double wait_s = (1.0 - tokens_) / rate_;
    lock.unlock();
    std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
    lock.lock();
  }
}

RemoteBackend::RemoteBackend(std::string id, RemoteOptions options)
    : CompletionBackend(std::move(id), BackendKind::remote), options_(std::move(options)) {
  if (options_.base_url.empty()) throw ConfigError(fmt::format("remote backend {}: base_url is required", this->id()));
  if (options_.api_key_env.empty()) {
    throw ConfigError(fmt::format("remote backend {}: api_key_env is required", this->id()));
  }
  if (options_.max_concurrency < 1) throw ConfigError("remote backend: max_concurrency must be >= 1");
  // Split "scheme://host[:port]/prefix" into client address and path prefix.
  const auto scheme_end = options_.base_url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError(fmt::format("invalid base_url {}", options_.base_url));
  const auto path_start = options_.base_url.find('/', scheme_end + 3);
  scheme_host_port_ = options_.base_url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "" : options_.base_url.substr(path_start);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/chat/completions";
  if (options_.rate_per_second > 0.0) bucket_.emplace(options_.rate_per_second, options_.burst);
}

json RemoteBackend::request_body(std::span<const ChatMessage> messages, const CompletionParams& params,
                                 const std::string& default_model) {
  return {{"model", params.model_id.empty() ? default_model : params.model_id},
          {"messages", to_json(messages)},
          {"temperature", params.temperature},
          {"max_tokens", params.max_output_tokens}};
}

Completion RemoteBackend::parse_response(const std::string& body, std::span<const ChatMessage> messages) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw BackendError(BackendError::Kind::malformed_response, fmt::format("response is not JSON: {}", e.what()));
  }
  if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
    throw BackendError(BackendError::Kind::malformed_response, "response has no choices");
  }
  const auto& message = j["choices"][0].value("message", json::object());
  if (!message.contains("content") || !message["content"].is_string()) {
    throw BackendError(BackendError::Kind::malformed_response, "choices[0].message.content missing");
  }
  Completion out;
  out.text = message["content"].get<std::string>();
  if (j.contains("usage") && j["usage"].is_object() && j["usage"].contains("prompt_tokens")) {
    out.usage.prompt_tokens = j["usage"].value("prompt_tokens", std::size_t{0});
    out.usage.completion_tokens = j["usage"].value("completion_tokens", std::size_t{0});
    out.usage.estimated = false;
  } else {
    for (const auto& m : messages) out.usage.prompt_tokens += forge::estimate_tokens(m.content);
    out.usage.completion_tokens = forge::estimate_tokens(out.text);
    out.usage.estimated = true;
  }
  return out;
}

Completion RemoteBackend::do_complete(std::span<const ChatMessage> messages, const CompletionParams& params,
                                      const CallContext&) {
  const char* key = std::getenv(options_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw BackendError(BackendError::Kind::auth,
                       fmt::format("remote backend {}: environment variable {} is not set", id(), options_.api_key_env));
  }
  {
    std::unique_lock lock(slots_mu_);
    slots_cv_.wait(lock, [&] { return in_flight_ < options_.max_concurrency; });
    ++in_flight_;
  }
  struct Release {
    RemoteBackend* self;
    ~Release() {
      {
        std::lock_guard lock(self->slots_mu_);
        --self->in_flight_;
      }
      self->slots_cv_.notify_one();
    }
  } release{this};

  const std::string body = canonical_dump(request_body(messages, params, options_.model));
  httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};
  for (const auto& [k, v] : options_.headers) headers.emplace(k, v);

  std::mt19937_64 jitter_rng(std::random_device{}());
  std::string last_error;
  for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
    if (bucket_) bucket_->acquire();
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    auto res = client.Post(path_, headers, body, "application/json");
    std::optional<std::chrono::milliseconds> hint;
    if (!res) {
      last_error = fmt::format("transport error: {}", httplib::to_string(res.error()));
    } else if (res->status == 200) {
      return parse_response(res->body, messages);
    } else if (res->status == 401 || res->status == 403) {
      throw BackendError(BackendError::Kind::auth, fmt::format("remote backend {}: HTTP {}", id(), res->status));
    } else if (!is_retryable_status(res->status)) {
      throw BackendError(BackendError::Kind::request,
                         fmt::format("remote backend {}: HTTP {}: {}", id(), res->status, res->body.substr(0, 200)));
    } else {
      last_error = fmt::format("HTTP {}", res->status);
      std::map<std::string, std::string> h(res->headers.begin(), res->headers.end());
      hint = parse_retry_after(h);
    }
    if (attempt == options_.retry.max_attempts) break;
    count_retry();
    const double draw = static_cast<double>(jitter_rng() >> 11) * 0x1.0p-53;
    auto delay = hint ? std::min(*hint, options_.retry.max_delay) : backoff_delay(options_.retry, attempt, draw);
    std::this_thread::sleep_for(delay);
  }
  throw BackendError(BackendError::Kind::exhausted,
                     fmt::format("remote backend {}: gave up after {} attempts ({})", id(),
                                 options_.retry.max_attempts, last_error));
}

}  // namespace latchbench::backend
