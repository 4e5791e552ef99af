#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "latchbench/forge/tokens.hpp"

namespace latchbench::forge {

enum class NoiseStyle {
  system_log,   // randomized log events
  low_entropy,  // repetitive heartbeat lines
};

struct NoiseBlock {
  std::string text;
  NoiseStyle style = NoiseStyle::system_log;
  std::uint64_t rng_seed = 0;
};

/// Synthetic log text of exactly `target_tokens` estimated tokens, built from
/// a fixed line grammar (timestamp, subsystem, level, event verb, object, hex
/// id). The same seed always yields the same text. If a forbidden string
/// appears, the block is regenerated from a derived seed; after a bounded
/// number of attempts a DomainError is raised.
NoiseBlock make_noise(std::uint64_t rng_seed, std::size_t target_tokens, std::span<const std::string> forbidden,
                      NoiseStyle style = NoiseStyle::system_log, int chars_per_token = kDefaultCharsPerToken);

/// True iff none of `forbidden` occurs in `text`.
bool is_pure(std::string_view text, std::span<const std::string> forbidden);

}  // namespace latchbench::forge
