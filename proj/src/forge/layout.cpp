#include "latchbench/forge/layout.hpp"

#include <fmt/core.h>

#include <cmath>

#include "latchbench/core/error.hpp"

namespace latchbench::forge {

namespace {

/// Byte index of the `k`-th character boundary (UTF-8) of `text`.
std::size_t byte_index_of_char(const std::string& text, std::size_t k) {
  std::size_t chars = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
      if (chars == k) return i;
      ++chars;
    }
  }
  return text.size();
}

}  // namespace

std::size_t total_tokens(const std::vector<Block>& blocks, int chars_per_token) {
  std::size_t total = 0;
  for (const auto& b : blocks) total += estimate_tokens(b.text, chars_per_token);
  return total;
}

Placement place_at_fraction(std::vector<Block> blocks, Block payload, double x, std::optional<std::size_t> final_total,
                            int chars_per_token, double tolerance) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(fmt::format("place_at_fraction: x={} outside [0,1]", x));
  if (blocks.empty()) throw DomainError("place_at_fraction: no blocks");
  const std::size_t payload_tokens = estimate_tokens(payload.text, chars_per_token);
  const std::size_t total = final_total.value_or(total_tokens(blocks, chars_per_token) + payload_tokens);
  if (total == 0) throw DomainError("place_at_fraction: empty context");
  const auto target = static_cast<std::size_t>(std::llround(x * static_cast<double>(total)));
  auto within = [&](std::size_t offset) {
    return std::abs(static_cast<double>(offset) / static_cast<double>(total) - x) <= tolerance;
  };

  std::size_t cursor = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::size_t tokens = estimate_tokens(blocks[i].text, chars_per_token);
    if (target == cursor) {
      blocks.insert(blocks.begin() + static_cast<std::ptrdiff_t>(i), std::move(payload));
      return {std::move(blocks), cursor};
    }
    if (target < cursor + tokens) {
      if (blocks[i].kind == BlockKind::noise) {
        // Splitting at a multiple of chars_per_token keeps token counts additive.
        const std::size_t split_chars = (target - cursor) * static_cast<std::size_t>(chars_per_token);
        const std::size_t at = byte_index_of_char(blocks[i].text, split_chars);
        Block tail{BlockKind::noise, blocks[i].speaker, blocks[i].text.substr(at), {}};
        blocks[i].text.resize(at);
        const auto pos = blocks.begin() + static_cast<std::ptrdiff_t>(i) + 1;
        auto it = blocks.insert(pos, std::move(payload));
        blocks.insert(it + 1, std::move(tail));
        return {std::move(blocks), target};
      }
      const std::size_t before = cursor;
      const std::size_t after = cursor + tokens;
      const bool prefer_after = (after - target) < (target - before);
      const std::size_t first = prefer_after ? after : before;
      const std::size_t second = prefer_after ? before : after;
      for (std::size_t choice : {first, second}) {
        if (within(choice)) {
          const auto idx = static_cast<std::ptrdiff_t>(choice == before ? i : i + 1);
          blocks.insert(blocks.begin() + idx, std::move(payload));
          return {std::move(blocks), choice};
        }
      }
      throw GeometryError(fmt::format(
          "cannot place payload {} at x={:.3f}: offset {} falls inside a {} block spanning [{}, {})",
          payload.payload_id, x, target, to_string(blocks[i].kind), before, after));
    }
    cursor += tokens;
  }
  // Target at or beyond the current end.
  if (!within(cursor)) {
    throw GeometryError(fmt::format("cannot place payload {} at x={:.3f}: context ends at {}", payload.payload_id, x,
                                    cursor));
  }
  blocks.push_back(std::move(payload));
  return {std::move(blocks), cursor};
}

std::vector<AssembledTurn> to_turns(const std::vector<Block>& blocks) {
  std::vector<AssembledTurn> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) {
    if (b.text.empty()) continue;
    out.push_back({b.speaker, b.kind, b.text, b.payload_id});
  }
  return out;
}

}  // namespace latchbench::forge
