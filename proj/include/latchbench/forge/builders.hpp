#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latchbench/forge/dialogue.hpp"
#include "latchbench/forge/trajectory.hpp"

namespace latchbench::forge {

inline constexpr std::size_t kShallowBudget = 2000;
inline constexpr std::size_t kStressBudget = 10000;

struct ForgeOptions {
  int chars_per_token = kDefaultCharsPerToken;
  /// Interior fractions of F1, F2, F3 in hijack trajectories.
  std::vector<double> hijack_fact_fractions = {0.35, 0.50, 0.65};
  /// Primacy-boundary decoy fractions; each must be <= 0.05.
  std::vector<double> decoy_fractions = {0.0, 0.03};
  double trough_fraction = 0.5;
  double recency_min_fraction = 0.9;
  double equidistant_g1_fraction = 0.25;
  double equidistant_g2_fraction = 0.75;
  double seed_tolerance = 0.02;
};

/// Answer-signal generator: "<Adjective> <Venue> <NNN>", e.g. "Cobalt Pavilion 417".
std::string make_signal(std::uint64_t seed);

/// Three-hop chain F1 -> F2 -> F3 whose last fact names `answer_signal`.
FactChain make_fact_chain(std::uint64_t seed, std::size_t length, const std::string& answer_signal);

/// Goal-critical fact and the update land in the last 10% of a 2K context.
Trajectory build_shallow(const DialogueSource& dialogue, const IntentPair& pair, std::uint64_t rng_seed,
                         std::size_t budget = kShallowBudget, const ForgeOptions& options = {});

/// Goal-critical fact buried at the trough (x=0.5) of a 10K log-padded
/// context; the update arrives as an administrative procedure notice.
Trajectory build_high_entropy(const DialogueSource& dialogue, const IntentPair& pair, std::uint64_t rng_seed,
                              std::size_t budget = kStressBudget, const ForgeOptions& options = {});

/// Three-stage trap: primacy decoys restating g1, a 3-hop fact chain inside
/// log noise, and distraction noise filling the rest.
Trajectory build_hijack(const DialogueSource& dialogue, const IntentPair& pair, const FactChain& chain,
                        std::uint64_t rng_seed, std::size_t budget = kStressBudget, const ForgeOptions& options = {});

/// g1 at 25% and g2 at 75% of low-entropy filler, mirror-symmetric about the centre.
Trajectory build_equidistant(const IntentPair& pair, std::uint64_t rng_seed, std::size_t budget = kStressBudget,
                             const ForgeOptions& options = {});

}  // namespace latchbench::forge
