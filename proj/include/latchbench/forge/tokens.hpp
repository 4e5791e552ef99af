#pragma once

#include <cstddef>
#include <string_view>

namespace latchbench::forge {

inline constexpr int kDefaultCharsPerToken = 4;

/// Number of characters (UTF-8 code points) in `text`.
std::size_t character_count(std::string_view text);

/// ceil(character_count / chars_per_token). Deterministic and monotone in
/// length; no provider tokenizer is consulted.
std::size_t estimate_tokens(std::string_view text, int chars_per_token = kDefaultCharsPerToken);

}  // namespace latchbench::forge
