#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace latchbench {

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// 64-bit FNV-1a. Stable across platforms; used for seed derivation.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);

std::uint64_t splitmix64(std::uint64_t x);

/// Derives a child seed from a parent seed and a sequence of string keys.
/// Depends only on the values, never on call order elsewhere in the program.
template <typename... Keys>
std::uint64_t derive_seed(std::uint64_t parent, const Keys&... keys) {
  std::uint64_t h = splitmix64(parent);
  ((h = splitmix64(h ^ fnv1a64(std::string_view(keys)))), ...);
  return h;
}

}  // namespace latchbench
