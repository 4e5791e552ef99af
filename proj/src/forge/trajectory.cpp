#include "latchbench/forge/trajectory.hpp"

#include <fmt/core.h>

#include <cmath>
#include <set>

#include "latchbench/core/error.hpp"
#include "latchbench/forge/noise.hpp"

namespace latchbench::forge {

std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::shallow: return "shallow";
    case Tier::high_entropy: return "high_entropy";
    case Tier::hijack: return "hijack";
    case Tier::equidistant: return "equidistant";
  }
  return "?";
}

Tier tier_from_string(std::string_view s) {
  if (s == "shallow") return Tier::shallow;
  if (s == "high_entropy") return Tier::high_entropy;
  if (s == "hijack") return Tier::hijack;
  if (s == "equidistant") return Tier::equidistant;
  throw FormatError(fmt::format("unknown tier '{}'", s));
}

std::string_view to_string(PayloadKind k) {
  switch (k) {
    case PayloadKind::fact: return "fact";
    case PayloadKind::intent: return "intent";
    case PayloadKind::decoy: return "decoy";
  }
  return "?";
}

PayloadKind payload_kind_from_string(std::string_view s) {
  if (s == "fact") return PayloadKind::fact;
  if (s == "intent") return PayloadKind::intent;
  if (s == "decoy") return PayloadKind::decoy;
  throw FormatError(fmt::format("unknown payload kind '{}'", s));
}

std::string_view to_string(BlockKind k) {
  switch (k) {
    case BlockKind::dialogue: return "dialogue";
    case BlockKind::noise: return "noise";
    case BlockKind::payload: return "payload";
  }
  return "?";
}

BlockKind block_kind_from_string(std::string_view s) {
  if (s == "dialogue") return BlockKind::dialogue;
  if (s == "noise") return BlockKind::noise;
  if (s == "payload") return BlockKind::payload;
  throw FormatError(fmt::format("unknown block kind '{}'", s));
}

void validate_fact_chain(const FactChain& chain) {
  if (chain.facts.empty()) throw DomainError("fact chain is empty");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < chain.facts.size(); ++i) {
    const auto& f = chain.facts[i];
    if (!ids.insert(f.fact_id).second) throw DomainError(fmt::format("duplicate fact id {}", f.fact_id));
    if (i == 0) {
      if (f.depends_on) throw DomainError("first fact must not depend on another fact");
    } else if (!f.depends_on || *f.depends_on != chain.facts[i - 1].fact_id) {
      throw DomainError(fmt::format("fact {} must depend on {}", f.fact_id, chain.facts[i - 1].fact_id));
    }
  }
  if (chain.answer_signal.empty()) throw DomainError("fact chain has no answer signal");
  if (chain.facts.back().statement.find(chain.answer_signal) == std::string::npos) {
    throw DomainError("answer signal must be stated by the last fact");
  }
  for (std::size_t i = 0; i + 1 < chain.facts.size(); ++i) {
    if (chain.facts[i].statement.find(chain.answer_signal) != std::string::npos) {
      throw DomainError("answer signal leaks into a predecessor fact");
    }
  }
}

std::size_t Trajectory::offset_of_turn(std::size_t index) const {
  std::size_t offset = 0;
  for (std::size_t i = 0; i < index && i < assembled_turns.size(); ++i) {
    offset += estimate_tokens(assembled_turns[i].text, chars_per_token);
  }
  return offset;
}

std::optional<std::size_t> Trajectory::find_payload(std::string_view payload_id) const {
  for (std::size_t i = 0; i < assembled_turns.size(); ++i) {
    if (assembled_turns[i].kind == BlockKind::payload && assembled_turns[i].payload_id == payload_id) return i;
  }
  return std::nullopt;
}

const SeedSpec* Trajectory::find_seed(std::string_view payload_id) const {
  for (const auto& s : seeds) {
    if (s.payload_id == payload_id) return &s;
  }
  return nullptr;
}

json to_json(const IntentPair& p) {
  return {{"g1_text", p.g1_text}, {"g2_text", p.g2_text}, {"g1_id", p.g1_id},
          {"g2_id", p.g2_id},     {"relation", p.relation}, {"template_id", p.template_id}};
}

IntentPair intent_pair_from_json(const json& j) {
  IntentPair p;
  p.g1_text = j.at("g1_text").get<std::string>();
  p.g2_text = j.at("g2_text").get<std::string>();
  p.g1_id = j.at("g1_id").get<std::string>();
  p.g2_id = j.at("g2_id").get<std::string>();
  p.relation = j.value("relation", "contradicts");
  p.template_id = j.value("template_id", "");
  return p;
}

json to_json(const FactChain& c) {
  json facts = json::array();
  for (const auto& f : c.facts) {
    facts.push_back({{"fact_id", f.fact_id},
                     {"statement", f.statement},
                     {"depends_on", f.depends_on ? json(*f.depends_on) : json(nullptr)}});
  }
  return {{"facts", std::move(facts)}, {"answer_signal", c.answer_signal}};
}

FactChain fact_chain_from_json(const json& j) {
  FactChain c;
  for (const auto& f : j.at("facts")) {
    Fact fact{f.at("fact_id").get<std::string>(), f.at("statement").get<std::string>(), std::nullopt};
    if (f.contains("depends_on") && !f["depends_on"].is_null()) fact.depends_on = f["depends_on"].get<std::string>();
    c.facts.push_back(std::move(fact));
  }
  c.answer_signal = j.at("answer_signal").get<std::string>();
  return c;
}

json to_json(const Trajectory& t) {
  json turns = json::array();
  for (const auto& turn : t.assembled_turns) {
    json jt = {{"speaker", to_string(turn.speaker)}, {"kind", to_string(turn.kind)}, {"text", turn.text}};
    if (!turn.payload_id.empty()) jt["payload_id"] = turn.payload_id;
    turns.push_back(std::move(jt));
  }
  json seeds = json::array();
  for (const auto& s : t.seeds) {
    seeds.push_back({{"payload_kind", to_string(s.payload_kind)},
                     {"payload_id", s.payload_id},
                     {"position_fraction", s.position_fraction},
                     {"placed_offset_tokens", s.placed_offset_tokens}});
  }
  return {{"id", t.id},
          {"tier", to_string(t.tier)},
          {"dialogue_id", t.dialogue_id},
          {"assembled_turns", std::move(turns)},
          {"token_count", t.token_count},
          {"budget_tokens", t.budget_tokens},
          {"chars_per_token", t.chars_per_token},
          {"seeds", std::move(seeds)},
          {"intent_pair", to_json(t.intent_pair)},
          {"fact_chain", t.fact_chain ? to_json(*t.fact_chain) : json(nullptr)},
          {"rng_seed", t.rng_seed},
          {"expected_signal", t.expected_signal},
          {"decoy_signal", t.decoy_signal}};
}

Trajectory trajectory_from_json(const json& j) {
  Trajectory t;
  t.id = j.at("id").get<std::string>();
  t.tier = tier_from_string(j.at("tier").get<std::string>());
  t.dialogue_id = j.value("dialogue_id", "");
  for (const auto& jt : j.at("assembled_turns")) {
    AssembledTurn turn;
    turn.speaker = speaker_from_string(jt.at("speaker").get<std::string>());
    turn.kind = block_kind_from_string(jt.at("kind").get<std::string>());
    turn.text = jt.at("text").get<std::string>();
    turn.payload_id = jt.value("payload_id", "");
    t.assembled_turns.push_back(std::move(turn));
  }
  t.token_count = j.at("token_count").get<std::size_t>();
  t.budget_tokens = j.at("budget_tokens").get<std::size_t>();
  t.chars_per_token = j.value("chars_per_token", kDefaultCharsPerToken);
  for (const auto& js : j.at("seeds")) {
    t.seeds.push_back({payload_kind_from_string(js.at("payload_kind").get<std::string>()),
                       js.at("payload_id").get<std::string>(), js.at("position_fraction").get<double>(),
                       js.at("placed_offset_tokens").get<std::size_t>()});
  }
  t.intent_pair = intent_pair_from_json(j.at("intent_pair"));
  if (j.contains("fact_chain") && !j["fact_chain"].is_null()) t.fact_chain = fact_chain_from_json(j["fact_chain"]);
  t.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  t.expected_signal = j.at("expected_signal").get<std::string>();
  t.decoy_signal = j.value("decoy_signal", "");
  return t;
}

std::vector<Trajectory> load_trajectories(const std::filesystem::path& path) {
  std::vector<Trajectory> out;
  read_jsonl(path, [&](const json& j, std::size_t index) {
    try {
      out.push_back(trajectory_from_json(j));
    } catch (const json::exception& e) {
      throw FormatError(fmt::format("{}: record {}: {}", path.string(), index, e.what()));
    }
  });
  return out;
}

void save_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories) {
  std::vector<std::string> lines;
  lines.reserve(trajectories.size());
  for (const auto& t : trajectories) lines.push_back(canonical_dump(to_json(t)));
  write_lines_atomic(path, lines);
}

std::vector<std::string> forbidden_strings(const Trajectory& t) {
  std::vector<std::string> out;
  auto add = [&](const std::string& s) {
    if (!s.empty()) out.push_back(s);
  };
  add(t.expected_signal);
  add(t.decoy_signal);
  add(t.intent_pair.g1_text);
  add(t.intent_pair.g2_text);
  if (t.fact_chain) {
    for (const auto& f : t.fact_chain->facts) add(f.statement);
    add(t.fact_chain->answer_signal);
  }
  return out;
}

std::vector<std::string> check_invariants(const Trajectory& t, double budget_tol, double seed_tol) {
  std::vector<std::string> problems;
  std::size_t total = 0;
  for (const auto& turn : t.assembled_turns) total += estimate_tokens(turn.text, t.chars_per_token);
  if (total != t.token_count) {
    problems.push_back(fmt::format("token_count {} disagrees with assembled total {}", t.token_count, total));
  }
  if (t.budget_tokens == 0) {
    problems.push_back("budget is zero");
    return problems;
  }
  const double budget_dev = std::abs(static_cast<double>(total) - static_cast<double>(t.budget_tokens)) /
                            static_cast<double>(t.budget_tokens);
  if (budget_dev > budget_tol) {
    problems.push_back(fmt::format("token_count {} outside {:.0f}% of budget {}", total, budget_tol * 100, t.budget_tokens));
  }
  for (const auto& s : t.seeds) {
    if (s.position_fraction < 0.0 || s.position_fraction > 1.0) {
      problems.push_back(fmt::format("seed {} target {} outside [0,1]", s.payload_id, s.position_fraction));
    }
    const double actual = static_cast<double>(s.placed_offset_tokens) / static_cast<double>(total);
    if (std::abs(actual - s.position_fraction) > seed_tol) {
      problems.push_back(fmt::format("seed {} at {:.4f}, target {:.4f}", s.payload_id, actual, s.position_fraction));
    }
    if (auto idx = t.find_payload(s.payload_id)) {
      if (t.offset_of_turn(*idx) != s.placed_offset_tokens) {
        problems.push_back(fmt::format("seed {} offset {} does not match layout", s.payload_id, s.placed_offset_tokens));
      }
    }
  }
  if (t.tier == Tier::equidistant) {
    auto g1 = t.find_payload(t.intent_pair.g1_id);
    auto g2 = t.find_payload(t.intent_pair.g2_id);
    if (!g1 || !g2) {
      problems.push_back("equidistant trajectory lacks intent payloads");
    } else {
      const auto g1_start = static_cast<double>(t.offset_of_turn(*g1));
      const auto g2_end = static_cast<double>(t.offset_of_turn(*g2 + 1));
      const double residual = std::abs(g1_start - (static_cast<double>(total) - g2_end));
      if (residual > 0.01 * static_cast<double>(total)) {
        problems.push_back(fmt::format("equidistant symmetry residual {} exceeds 1% of {}", residual, total));
      }
    }
  }
  const auto forbidden = forbidden_strings(t);
  for (const auto& turn : t.assembled_turns) {
    if (turn.kind == BlockKind::noise && !is_pure(turn.text, forbidden)) {
      problems.push_back("noise block contains a forbidden string");
    }
  }
  return problems;
}

}  // namespace latchbench::forge
