#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latchbench/core/jsonl.hpp"
#include "latchbench/forge/dialogue.hpp"
#include "latchbench/forge/tokens.hpp"

namespace latchbench::forge {

enum class Tier { shallow, high_entropy, hijack, equidistant };

std::string_view to_string(Tier t);
Tier tier_from_string(std::string_view s);

/// Archived intent (g1) and the update that supersedes it (g2).
struct IntentPair {
  std::string g1_text;
  std::string g2_text;
  std::string g1_id;
  std::string g2_id;
  std::string relation = "contradicts";
  std::string template_id;  // empty for dynamically generated updates

  friend bool operator==(const IntentPair&, const IntentPair&) = default;
};

struct Fact {
  std::string fact_id;
  std::string statement;
  std::optional<std::string> depends_on;

  friend bool operator==(const Fact&, const Fact&) = default;
};

/// F1 -> F2 -> ... ; the answer signal is stated only by the last fact.
struct FactChain {
  std::vector<Fact> facts;
  std::string answer_signal;

  friend bool operator==(const FactChain&, const FactChain&) = default;
};

/// Throws DomainError unless the chain is non-empty, acyclic and linear.
void validate_fact_chain(const FactChain& chain);

enum class PayloadKind { fact, intent, decoy };

std::string_view to_string(PayloadKind k);
PayloadKind payload_kind_from_string(std::string_view s);

struct SeedSpec {
  PayloadKind payload_kind = PayloadKind::fact;
  std::string payload_id;
  double position_fraction = 0.0;
  std::size_t placed_offset_tokens = 0;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

enum class BlockKind { dialogue, noise, payload };

std::string_view to_string(BlockKind k);
BlockKind block_kind_from_string(std::string_view s);

struct AssembledTurn {
  Speaker speaker = Speaker::system;
  BlockKind kind = BlockKind::dialogue;
  std::string text;
  std::string payload_id;  // set for payload blocks

  friend bool operator==(const AssembledTurn&, const AssembledTurn&) = default;
};

struct Trajectory {
  std::string id;
  Tier tier = Tier::shallow;
  std::string dialogue_id;
  std::vector<AssembledTurn> assembled_turns;
  std::size_t token_count = 0;
  std::size_t budget_tokens = 0;
  int chars_per_token = kDefaultCharsPerToken;
  std::vector<SeedSpec> seeds;
  IntentPair intent_pair;
  std::optional<FactChain> fact_chain;
  std::uint64_t rng_seed = 0;
  std::string expected_signal;
  std::string decoy_signal;

  /// Token offset at which turn `index` starts.
  std::size_t offset_of_turn(std::size_t index) const;

  /// Index of the payload turn with this id, if any.
  std::optional<std::size_t> find_payload(std::string_view payload_id) const;

  const SeedSpec* find_seed(std::string_view payload_id) const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

json to_json(const IntentPair& p);
IntentPair intent_pair_from_json(const json& j);
json to_json(const FactChain& c);
FactChain fact_chain_from_json(const json& j);
json to_json(const Trajectory& t);
Trajectory trajectory_from_json(const json& j);

std::vector<Trajectory> load_trajectories(const std::filesystem::path& path);
void save_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories);

/// Invariant check of an assembled trajectory: budget within `budget_tol`,
/// every seed within `seed_tol` of its target, seeds agree with the turn
/// layout, equidistant symmetry within 1% of total, and noise purity. Returns
/// one message per violation; empty means valid.
std::vector<std::string> check_invariants(const Trajectory& t, double budget_tol = 0.02, double seed_tol = 0.02);

/// Strings no noise block may contain for this trajectory.
std::vector<std::string> forbidden_strings(const Trajectory& t);

}  // namespace latchbench::forge
