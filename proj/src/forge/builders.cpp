#include "latchbench/forge/builders.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <array>

#include "latchbench/core/error.hpp"
#include "latchbench/core/hash.hpp"
#include "latchbench/core/rng.hpp"
#include "latchbench/core/text.hpp"
#include "latchbench/forge/layout.hpp"
#include "latchbench/forge/noise.hpp"

namespace latchbench::forge {

namespace {

constexpr std::array kSignalAdjectives = {"Cobalt", "Saffron", "Juniper", "Obsidian", "Marigold", "Cerulean",
                                          "Tamarind", "Vermilion", "Quartz", "Heliotrope", "Basalt", "Larch",
                                          "Nimbus", "Umber", "Zephyr", "Mulberry", "Garnet", "Sorrel",
                                          "Indigo", "Petrel", "Wisteria", "Halcyon", "Cinder", "Ochre"};
constexpr std::array kSignalNouns = {"Pavilion", "Atrium",  "Rotunda", "Conservatory", "Gallery", "Loggia",
                                     "Cloister", "Orangery", "Arcade", "Lyceum",       "Belvedere", "Portico",
                                     "Terrace",  "Vestibule", "Annex", "Colonnade"};
constexpr std::array kDesks = {"K", "M", "R", "T", "V", "X"};
constexpr std::array kRegions = {"Ashgrove", "Brindle", "Copperfell", "Dunmore", "Elderwick", "Fallowmere",
                                 "Glenholt", "Hartsway"};

std::string dialogue_id_from_intent(const IntentPair& pair) {
  const auto colon = pair.g1_id.find(':');
  return colon == std::string::npos ? pair.g1_id : pair.g1_id.substr(0, colon);
}

struct Signals {
  std::string expected;
  std::string decoy;
};

Signals make_signals(std::uint64_t rng_seed) {
  Signals s{make_signal(derive_seed(rng_seed, "signal")), {}};
  for (int i = 0;; ++i) {
    s.decoy = make_signal(derive_seed(rng_seed, "decoy", std::to_string(i)));
    if (s.decoy.find(s.expected) == std::string::npos && s.expected.find(s.decoy) == std::string::npos) break;
  }
  return s;
}

std::vector<Block> dialogue_blocks(const DialogueSource& dialogue) {
  std::vector<Block> out;
  for (const auto& turn : dialogue.turns) out.push_back({BlockKind::dialogue, turn.speaker, turn.text, {}});
  return out;
}

std::size_t tokens_of(const std::vector<Block>& blocks, int cpt) { return total_tokens(blocks, cpt); }

/// Locates the dialogue turn that states g1; falls back to the last user turn.
std::size_t g1_turn_index(const std::vector<AssembledTurn>& turns, const IntentPair& pair) {
  std::optional<std::size_t> last_user;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    if (turns[i].kind != BlockKind::dialogue) continue;
    if (turns[i].text.find(pair.g1_text) != std::string::npos) return i;
    if (turns[i].speaker == Speaker::user) last_user = i;
  }
  return last_user.value_or(0);
}

struct PendingPayload {
  Block block;
  PayloadKind kind;
  double x;
};

/// Common assembly: `base` already holds dialogue, filler and any tail; the
/// pending payloads are inserted in ascending x so earlier offsets are final.
Trajectory assemble(std::string id, Tier tier, std::string dialogue_id, std::vector<Block> base,
                    std::vector<PendingPayload> pending, std::size_t budget, const ForgeOptions& options) {
  std::stable_sort(pending.begin(), pending.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
  std::vector<SeedSpec> seeds;
  for (auto& p : pending) {
    auto placement = place_at_fraction(std::move(base), p.block, p.x, budget, options.chars_per_token,
                                       options.seed_tolerance);
    base = std::move(placement.blocks);
    seeds.push_back({p.kind, p.block.payload_id, p.x, placement.placed_offset_tokens});
  }
  Trajectory t;
  t.id = std::move(id);
  t.tier = tier;
  t.dialogue_id = std::move(dialogue_id);
  t.assembled_turns = to_turns(base);
  t.token_count = tokens_of(base, options.chars_per_token);
  t.budget_tokens = budget;
  t.chars_per_token = options.chars_per_token;
  t.seeds = std::move(seeds);
  return t;
}

void fill_noise(std::vector<Block>& base, std::size_t insert_at, std::size_t noise_tokens,
                const std::vector<std::string>& forbidden, std::uint64_t rng_seed, NoiseStyle style,
                const ForgeOptions& options) {
  if (noise_tokens == 0) return;
  auto noise = make_noise(derive_seed(rng_seed, "noise"), noise_tokens, forbidden, style, options.chars_per_token);
  base.insert(base.begin() + static_cast<std::ptrdiff_t>(insert_at),
              Block{BlockKind::noise, Speaker::system, std::move(noise.text), {}});
}

void add_seed_for_turn(Trajectory& t, PayloadKind kind, const std::string& id, std::size_t turn_index) {
  const auto offset = t.offset_of_turn(turn_index);
  t.seeds.push_back({kind, id, static_cast<double>(offset) / static_cast<double>(t.token_count), offset});
}

std::vector<std::string> forbidden_for(const IntentPair& pair, const Signals& signals, const FactChain* chain) {
  std::vector<std::string> f = {signals.expected, signals.decoy, pair.g1_text, pair.g2_text};
  if (chain) {
    for (const auto& fact : chain->facts) f.push_back(fact.statement);
  }
  std::erase_if(f, [](const std::string& s) { return s.empty(); });
  return f;
}

void require_fit(const std::string& what, std::size_t fixed, std::size_t budget) {
  if (fixed > budget) {
    throw GeometryError(fmt::format("{}: dialogue and payloads need {} tokens, budget is {}", what, fixed, budget));
  }
}

}  // namespace

std::string make_signal(std::uint64_t seed) {
  Rng rng(seed);
  const auto* adj = kSignalAdjectives[rng.below(kSignalAdjectives.size())];
  const auto* noun = kSignalNouns[rng.below(kSignalNouns.size())];
  return fmt::format("{} {} {}", adj, noun, 100 + rng.below(900));
}

FactChain make_fact_chain(std::uint64_t seed, std::size_t length, const std::string& answer_signal) {
  if (length == 0) throw DomainError("fact chain length must be >= 1");
  Rng rng(seed);
  FactChain chain;
  chain.answer_signal = answer_signal;
  // Intermediate hop names: desk codes, then regions.
  std::vector<std::string> hops;
  for (std::size_t i = 0; i + 1 < length; ++i) {
    if (i % 2 == 0) {
      hops.push_back(fmt::format("desk {}-{}", kDesks[rng.below(kDesks.size())], 10 + rng.below(90)));
    } else {
      hops.push_back(fmt::format("region {}", kRegions[rng.below(kRegions.size())]));
    }
  }
  for (std::size_t i = 0; i < length; ++i) {
    Fact f;
    f.fact_id = fmt::format("F{}", i + 1);
    if (i > 0) f.depends_on = fmt::format("F{}", i);
    if (length == 1) {
      f.statement = fmt::format("Under the amended request the assigned option is {}.", answer_signal);
    } else if (i == 0) {
      f.statement = fmt::format("The amended request was routed to {}.", hops[0]);
    } else if (i + 1 < length) {
      f.statement = fmt::format("All amended bookings at {} are handed to {}.", hops[i - 1], hops[i]);
    } else {
      f.statement = fmt::format("Bookings handed to {} are confirmed at {}.", hops[i - 1], answer_signal);
    }
    chain.facts.push_back(std::move(f));
  }
  validate_fact_chain(chain);
  return chain;
}

Trajectory build_shallow(const DialogueSource& dialogue, const IntentPair& pair, std::uint64_t rng_seed,
                         std::size_t budget, const ForgeOptions& options) {
  const int cpt = options.chars_per_token;
  const auto signals = make_signals(rng_seed);
  const auto chain = make_fact_chain(derive_seed(rng_seed, "chain"), 1, signals.expected);
  Block fact{BlockKind::payload, Speaker::system, fmt::format("SYSTEM CONFIRMATION [F1]: {}", chain.facts[0].statement),
             "F1"};
  Block update{BlockKind::payload, Speaker::user, pair.g2_text, pair.g2_id};

  auto base = dialogue_blocks(dialogue);
  const std::size_t fact_tokens = estimate_tokens(fact.text, cpt);
  const std::size_t update_tokens = estimate_tokens(update.text, cpt);
  const std::size_t fixed = tokens_of(base, cpt) + fact_tokens + update_tokens;
  require_fit("shallow", fixed, budget);
  const double fact_x = static_cast<double>(budget - fact_tokens - update_tokens) / static_cast<double>(budget);
  if (fact_x < options.recency_min_fraction) {
    throw GeometryError(fmt::format("shallow: payloads too long for recency seeding (x={:.3f})", fact_x));
  }
  const auto forbidden = forbidden_for(pair, signals, &chain);
  fill_noise(base, base.size(), budget - fixed, forbidden, rng_seed, NoiseStyle::system_log, options);
  base.push_back(update);

  auto t = assemble(fmt::format("shallow-{}", dialogue.id), Tier::shallow, dialogue.id, std::move(base),
                    {{fact, PayloadKind::fact, fact_x}}, budget, options);
  const auto g2_index = *t.find_payload(pair.g2_id);
  add_seed_for_turn(t, PayloadKind::intent, pair.g2_id, g2_index);
  add_seed_for_turn(t, PayloadKind::intent, pair.g1_id, g1_turn_index(t.assembled_turns, pair));
  t.intent_pair = pair;
  t.fact_chain = chain;
  t.rng_seed = rng_seed;
  t.expected_signal = signals.expected;
  t.decoy_signal = signals.decoy;
  return t;
}

Trajectory build_high_entropy(const DialogueSource& dialogue, const IntentPair& pair, std::uint64_t rng_seed,
                              std::size_t budget, const ForgeOptions& options) {
  const int cpt = options.chars_per_token;
  const auto signals = make_signals(rng_seed);
  const auto chain = make_fact_chain(derive_seed(rng_seed, "chain"), 1, signals.expected);
  Block fact{BlockKind::payload, Speaker::system, fmt::format("SYSTEM CONFIRMATION [F1]: {}", chain.facts[0].statement),
             "F1"};
  Block update{BlockKind::payload, Speaker::user,
               fmt::format("ADMINISTRATIVE PROCEDURE NOTICE ({}): Per the customer's latest instruction, the booking "
                           "profile is amended as follows. {}",
                           pair.g2_id, pair.g2_text),
               pair.g2_id};

  auto base = dialogue_blocks(dialogue);
  const std::size_t fixed = tokens_of(base, cpt) + estimate_tokens(fact.text, cpt) + estimate_tokens(update.text, cpt);
  require_fit("high_entropy", fixed, budget);
  const auto forbidden = forbidden_for(pair, signals, &chain);
  fill_noise(base, base.size(), budget - fixed, forbidden, rng_seed, NoiseStyle::system_log, options);
  base.push_back(update);

  auto t = assemble(fmt::format("high_entropy-{}", dialogue.id), Tier::high_entropy, dialogue.id, std::move(base),
                    {{fact, PayloadKind::fact, options.trough_fraction}}, budget, options);
  add_seed_for_turn(t, PayloadKind::intent, pair.g2_id, *t.find_payload(pair.g2_id));
  add_seed_for_turn(t, PayloadKind::intent, pair.g1_id, g1_turn_index(t.assembled_turns, pair));
  t.intent_pair = pair;
  t.fact_chain = chain;
  t.rng_seed = rng_seed;
  t.expected_signal = signals.expected;
  t.decoy_signal = signals.decoy;
  return t;
}

Trajectory build_hijack(const DialogueSource& dialogue, const IntentPair& pair, const FactChain& chain,
                        std::uint64_t rng_seed, std::size_t budget, const ForgeOptions& options) {
  if (chain.facts.size() != 3) {
    throw DomainError(fmt::format("hijack needs a 3-fact chain, got {}", chain.facts.size()));
  }
  validate_fact_chain(chain);
  if (options.hijack_fact_fractions.size() != 3) throw DomainError("hijack needs three fact fractions");
  for (double d : options.decoy_fractions) {
    if (d > 0.05) throw DomainError("decoys must sit at the primacy boundary (x <= 0.05)");
  }
  const int cpt = options.chars_per_token;
  Signals signals{chain.answer_signal, {}};
  for (int i = 0;; ++i) {
    signals.decoy = make_signal(derive_seed(rng_seed, "decoy", std::to_string(i)));
    if (signals.decoy.find(signals.expected) == std::string::npos &&
        signals.expected.find(signals.decoy) == std::string::npos)
      break;
  }

  std::vector<PendingPayload> pending;
  for (std::size_t i = 0; i < options.decoy_fractions.size(); ++i) {
    Block decoy{BlockKind::payload, Speaker::system,
                fmt::format("SYSTEM NOTICE [{}]: Valid standing instruction on file. {} Confirmed venue: {}.",
                            pair.g1_id, pair.g1_text, signals.decoy),
                fmt::format("D{}", i + 1)};
    pending.push_back({std::move(decoy), PayloadKind::decoy, options.decoy_fractions[i]});
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& f = chain.facts[i];
    pending.push_back({Block{BlockKind::payload, Speaker::system, fmt::format("LOG NOTE [{}]: {}", f.fact_id, f.statement),
                             f.fact_id},
                       PayloadKind::fact, options.hijack_fact_fractions[i]});
  }
  Block update{BlockKind::payload, Speaker::user, pair.g2_text, pair.g2_id};

  auto base = dialogue_blocks(dialogue);
  std::size_t fixed = tokens_of(base, cpt) + estimate_tokens(update.text, cpt);
  for (const auto& p : pending) fixed += estimate_tokens(p.block.text, cpt);
  require_fit("hijack", fixed, budget);
  const auto forbidden = forbidden_for(pair, signals, &chain);
  fill_noise(base, base.size(), budget - fixed, forbidden, rng_seed, NoiseStyle::system_log, options);
  base.push_back(update);

  auto t = assemble(fmt::format("hijack-{}", dialogue.id), Tier::hijack, dialogue.id, std::move(base),
                    std::move(pending), budget, options);
  add_seed_for_turn(t, PayloadKind::intent, pair.g2_id, *t.find_payload(pair.g2_id));
  add_seed_for_turn(t, PayloadKind::intent, pair.g1_id, g1_turn_index(t.assembled_turns, pair));
  t.intent_pair = pair;
  t.fact_chain = chain;
  t.rng_seed = rng_seed;
  t.expected_signal = signals.expected;
  t.decoy_signal = signals.decoy;
  return t;
}

Trajectory build_equidistant(const IntentPair& pair, std::uint64_t rng_seed, std::size_t budget,
                             const ForgeOptions& options) {
  if (pair.g1_text == pair.g2_text) throw DomainError("intent pair texts must differ");
  const int cpt = options.chars_per_token;
  const auto signals = make_signals(rng_seed);
  Block g1{BlockKind::payload, Speaker::user,
           fmt::format("[{}] {} Please reserve option {}.", pair.g1_id, pair.g1_text, signals.decoy), pair.g1_id};
  Block g2{BlockKind::payload, Speaker::user,
           fmt::format("[{}] {} Please reserve option {} instead.", pair.g2_id, pair.g2_text, signals.expected),
           pair.g2_id};
  const std::size_t g1_tokens = estimate_tokens(g1.text, cpt);
  const std::size_t g2_tokens = estimate_tokens(g2.text, cpt);
  require_fit("equidistant", g1_tokens + g2_tokens, budget);

  std::vector<Block> base;
  const auto forbidden = forbidden_for(pair, signals, nullptr);
  fill_noise(base, 0, budget - g1_tokens - g2_tokens, forbidden, rng_seed, NoiseStyle::low_entropy, options);

  // g2 ends where g1 would start if the context were mirrored.
  const double g2_start_x =
      (options.equidistant_g2_fraction * static_cast<double>(budget) - static_cast<double>(g2_tokens)) /
      static_cast<double>(budget);
  const auto dialogue_id = dialogue_id_from_intent(pair);
  auto t = assemble(fmt::format("equidistant-{}", dialogue_id), Tier::equidistant, dialogue_id, std::move(base),
                    {{g1, PayloadKind::intent, options.equidistant_g1_fraction}, {g2, PayloadKind::intent, g2_start_x}},
                    budget, options);
  for (auto& s : t.seeds) {
    if (s.payload_id == pair.g2_id) s.position_fraction = options.equidistant_g2_fraction;
  }
  t.intent_pair = pair;
  t.rng_seed = rng_seed;
  t.expected_signal = signals.expected;
  t.decoy_signal = signals.decoy;
  return t;
}

}  // namespace latchbench::forge
