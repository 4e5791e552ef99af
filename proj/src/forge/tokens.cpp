#include "latchbench/forge/tokens.hpp"

#include "latchbench/core/error.hpp"

namespace latchbench::forge {

std::size_t character_count(std::string_view text) {
  std::size_t n = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::size_t estimate_tokens(std::string_view text, int chars_per_token) {
  if (chars_per_token <= 0) throw DomainError("chars_per_token must be positive");
  const auto cpt = static_cast<std::size_t>(chars_per_token);
  return (character_count(text) + cpt - 1) / cpt;
}

}  // namespace latchbench::forge
