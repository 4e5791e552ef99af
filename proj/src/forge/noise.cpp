#include "latchbench/forge/noise.hpp"

#include <fmt/core.h>

#include <array>

#include "latchbench/core/error.hpp"
#include "latchbench/core/hash.hpp"
#include "latchbench/core/rng.hpp"

namespace latchbench::forge {

namespace {

constexpr int kMaxAttempts = 16;

constexpr std::array kSubsystems = {"scheduler", "kv-store", "auth-gw",  "billing", "ingest",
                                    "replicator", "cron",    "metrics",  "dns-cache", "queue-7",
                                    "gc",         "lb-edge", "blobsync", "raft",     "webhook"};
constexpr std::array kLevels = {"INFO", "DEBUG", "WARN", "TRACE"};
constexpr std::array kVerbs = {"flushed", "rotated", "acked",     "retried", "evicted",  "compacted",
                               "synced",  "spawned", "reaped",    "drained", "rebuilt",  "throttled",
                               "pinned",  "leased",  "released",  "probed",  "migrated", "sealed"};
constexpr std::array kObjects = {"segment", "lease",  "shard",    "buffer", "session", "cursor",
                                 "snapshot", "socket", "manifest", "bucket", "replica", "pipe",
                                 "chunk",    "index",  "journal",  "slot"};

std::string log_line(Rng& rng) {
  const auto month = 1 + rng.below(12);
  const auto day = 1 + rng.below(28);
  const auto hour = rng.below(24);
  const auto minute = rng.below(60);
  const auto second = rng.below(60);
  const auto millis = rng.below(1000);
  return fmt::format("[2025-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z] {} {} {} {} id=0x{:08x} latency_ms={}\n", month,
                     day, hour, minute, second, millis, kSubsystems[rng.below(kSubsystems.size())],
                     kLevels[rng.below(kLevels.size())], kVerbs[rng.below(kVerbs.size())],
                     kObjects[rng.below(kObjects.size())], static_cast<std::uint32_t>(rng.next()),
                     rng.below(900) + 1);
}

std::string heartbeat_line(std::uint64_t seq) {
  return fmt::format("[heartbeat] seq={:06} status=ok\n", seq);
}

std::string generate(std::uint64_t seed, std::size_t target_chars, NoiseStyle style) {
  Rng rng(seed);
  std::string out;
  out.reserve(target_chars + 128);
  std::uint64_t seq = rng.below(1000);
  while (out.size() < target_chars) {
    out += style == NoiseStyle::system_log ? log_line(rng) : heartbeat_line(seq++);
  }
  out.resize(target_chars);
  return out;
}

}  // namespace

bool is_pure(std::string_view text, std::span<const std::string> forbidden) {
  for (const auto& f : forbidden) {
    if (!f.empty() && text.find(f) != std::string_view::npos) return false;
  }
  return true;
}

NoiseBlock make_noise(std::uint64_t rng_seed, std::size_t target_tokens, std::span<const std::string> forbidden,
                      NoiseStyle style, int chars_per_token) {
  if (target_tokens == 0) throw DomainError("make_noise: target_tokens must be positive");
  if (chars_per_token <= 0) throw DomainError("make_noise: chars_per_token must be positive");
  // Output is pure ASCII, so characters == bytes and the estimate is exact.
  const std::size_t target_chars = target_tokens * static_cast<std::size_t>(chars_per_token);
  std::uint64_t seed = rng_seed;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    auto text = generate(seed, target_chars, style);
    if (is_pure(text, forbidden)) return {std::move(text), style, rng_seed};
    seed = derive_seed(rng_seed, "noise-retry", std::to_string(attempt));
  }
  throw DomainError(
      fmt::format("make_noise: forbidden substrings still present after {} attempts (seed {})", kMaxAttempts, rng_seed));
}

}  // namespace latchbench::forge
