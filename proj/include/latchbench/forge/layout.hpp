#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "latchbench/forge/trajectory.hpp"

namespace latchbench::forge {

/// One content block of a trajectory under construction. Only noise blocks
/// may be split; dialogue and payload blocks move as a unit.
struct Block {
  BlockKind kind = BlockKind::noise;
  Speaker speaker = Speaker::system;
  std::string text;
  std::string payload_id;
};

struct Placement {
  std::vector<Block> blocks;
  std::size_t placed_offset_tokens = 0;
};

std::size_t total_tokens(const std::vector<Block>& blocks, int chars_per_token = kDefaultCharsPerToken);

/// Inserts `payload` so its starting offset divided by the final total is
/// within `tolerance` of `x`. The final total defaults to the current total
/// plus the payload; builders that insert several payloads pass the eventual
/// total. A noise block straddling the target offset is split there; a
/// dialogue or payload block is never split, so the nearest boundary of that
/// block is used, and a GeometryError is raised if neither boundary is within
/// tolerance.
Placement place_at_fraction(std::vector<Block> blocks, Block payload, double x,
                            std::optional<std::size_t> final_total = std::nullopt,
                            int chars_per_token = kDefaultCharsPerToken, double tolerance = 0.02);

std::vector<AssembledTurn> to_turns(const std::vector<Block>& blocks);

}  // namespace latchbench::forge
