#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "latchbench/forge/builders.hpp"
#include "latchbench/forge/dialogue.hpp"
#include "latchbench/forge/trajectory.hpp"
#include "latchbench/orchestrator/config.hpp"

namespace latchbench::testing {

/// MultiWOZ-like booking dialogues (hotel, restaurant, train, taxi) with
/// keyword constraints the update templates react to.
std::vector<forge::DialogueSource> synthetic_corpus(std::size_t n, std::uint64_t seed);

/// Fresh empty directory under the system temp dir.
std::filesystem::path fresh_dir(std::string_view name);

/// Forges one trajectory of `tier` from dialogue `index` of a synthetic corpus.
forge::Trajectory forge_one(forge::Tier tier, std::size_t index, std::uint64_t seed);

std::string slurp(const std::filesystem::path& p);

}  // namespace latchbench::testing
