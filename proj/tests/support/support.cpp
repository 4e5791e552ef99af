#include "support.hpp"

#include <fmt/core.h>

#include <array>
#include <atomic>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "latchbench/core/hash.hpp"
#include "latchbench/core/rng.hpp"
#include "latchbench/forge/update.hpp"

namespace latchbench::testing {

namespace {

struct Domain {
  const char* name;
  std::vector<std::string> openers;
  std::vector<std::string> constraints;
  std::vector<std::string> replies;
};

const std::vector<Domain>& domains() {
  static const std::vector<Domain> d = {
      {"hotel",
       {"I am looking for a place to stay in Cambridge.", "Can you help me find a hotel for next week?"},
       {"I would like a cheap hotel please.", "It should be in the north of town.",
        "I need free parking at the hotel.", "Something expensive would be fine.", "It has to have free wifi.",
        "I want a 4 star hotel."},
       {"I have several options for you. Do you have an area preference?",
        "There are a few guesthouses that match. How many nights will you stay?",
        "Sure, I can check availability for that."}},
      {"restaurant",
       {"I am looking for somewhere to eat tonight.", "Can you recommend a restaurant?"},
       {"I want a moderate price range.", "It should be in the centre please.", "I would like Indian food.",
        "Somewhere in the south would be best.", "I prefer a cheap place to eat."},
       {"There are many restaurants like that. Any cuisine preference?",
        "I found a few matches. What time would you like the table?", "I can book that for you."}},
      {"train",
       {"I need a train to London on Friday.", "Can you find me a train from Cambridge?"},
       {"I want to take the train that leaves after 10:00.", "The train should arrive by 18:00.",
        "I need the train for 3 people."},
       {"There are several trains that day. Where will you depart from?", "I have a train at 11:21. Shall I book it?"}},
      {"taxi",
       {"I need a taxi from my hotel.", "Please book me a taxi."},
       {"It should pick me up in the west of town.", "I want to leave from the east side.",
        "The taxi should arrive by 17:45."},
       {"What time would you like to leave?", "Your taxi is a grey Toyota. Anything else?"}},
  };
  return d;
}

}  // namespace

std::vector<forge::DialogueSource> synthetic_corpus(std::size_t n, std::uint64_t seed) {
  std::vector<forge::DialogueSource> out;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, "dialogue", std::to_string(i)));
    const auto& dom = domains()[rng.below(domains().size())];
    forge::DialogueSource d;
    d.id = fmt::format("{}{:04}.json", i % 3 == 0 ? "MUL" : "SNG", i);
    d.domain_tags = {dom.name};
    d.turns.push_back({forge::Speaker::user, dom.openers[rng.below(dom.openers.size())]});
    const auto exchanges = 1 + rng.below(3);
    for (std::size_t k = 0; k < exchanges; ++k) {
      d.turns.push_back({forge::Speaker::system, dom.replies[rng.below(dom.replies.size())]});
      d.turns.push_back({forge::Speaker::user, dom.constraints[rng.below(dom.constraints.size())]});
    }
    d.turns.push_back({forge::Speaker::system, "Let me check that for you."});
    out.push_back(std::move(d));
  }
  return out;
}

std::filesystem::path fresh_dir(std::string_view name) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             fmt::format("latchbench-test-{}-{}-{}", ::getpid(), counter.fetch_add(1), name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

forge::Trajectory forge_one(forge::Tier tier, std::size_t index, std::uint64_t seed) {
  const auto corpus = synthetic_corpus(index + 1, seed);
  const auto& d = corpus[index];
  const auto pair = forge::generate_update(d, forge::UpdateMode::templated);
  const auto tseed = derive_seed(seed, d.id, forge::to_string(tier));
  switch (tier) {
    case forge::Tier::shallow: return forge::build_shallow(d, pair, tseed);
    case forge::Tier::high_entropy: return forge::build_high_entropy(d, pair, tseed);
    case forge::Tier::hijack: {
      const auto chain =
          forge::make_fact_chain(derive_seed(tseed, "chain"), 3, forge::make_signal(derive_seed(tseed, "signal")));
      return forge::build_hijack(d, pair, chain, tseed);
    }
    case forge::Tier::equidistant: return forge::build_equidistant(pair, tseed);
  }
  return {};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace latchbench::testing
