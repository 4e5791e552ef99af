#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "latchbench/backend/scripted.hpp"
#include "latchbench/core/hash.hpp"
#include "latchbench/core/text.hpp"
#include "latchbench/forge/builders.hpp"
#include "latchbench/forge/layout.hpp"
#include "latchbench/forge/noise.hpp"
#include "latchbench/forge/update.hpp"
#include "support.hpp"

using namespace latchbench;
using namespace latchbench::forge;

namespace {

double fraction(const Trajectory& t, const std::string& payload_id) {
  const auto* s = t.find_seed(payload_id);
  REQUIRE(s != nullptr);
  return static_cast<double>(s->placed_offset_tokens) / static_cast<double>(t.token_count);
}

std::vector<std::string> noise_texts(const Trajectory& t) {
  std::vector<std::string> out;
  for (const auto& turn : t.assembled_turns) {
    if (turn.kind == BlockKind::noise) out.push_back(turn.text);
  }
  return out;
}

}  // namespace

TEST_SUITE("forge") {
  TEST_CASE("token estimator") {
    CHECK(estimate_tokens("") == 0);
    CHECK(estimate_tokens(std::string(4000, 'a')) == 1000);
    CHECK(estimate_tokens("abcdefghij", 3) == 4);
    CHECK(estimate_tokens("abcde") == 2);
    // Monotone in length.
    std::size_t prev = 0;
    for (std::size_t n = 0; n < 200; ++n) {
      const auto e = estimate_tokens(std::string(n, 'x'));
      CHECK(e >= prev);
      prev = e;
    }
    // Code points, not bytes.
    CHECK(character_count("caf\xc3\xa9") == 4);
  }

  TEST_CASE("load_dialogues limits and errors") {
    const auto dir = testing::fresh_dir("corpus");
    const auto corpus = testing::synthetic_corpus(1000, 1);
    save_dialogues(dir / "c.jsonl", corpus);
    CHECK(load_dialogues(dir / "c.jsonl").size() == 1000);
    CHECK(load_dialogues(dir / "c.jsonl", 0).empty());
    CHECK(load_dialogues(dir / "c.jsonl", 7).size() == 7);
    CHECK(load_dialogues(dir / "c.jsonl", 3)[2] == corpus[2]);

    {
      std::ofstream f(dir / "bad.jsonl");
      f << R"({"id":"a","turns":[{"speaker":"user","text":"hi"}],"domains":[]})" << "\n";
      f << R"({"id":"b","turns":[]})" << "\n";
      f << R"({"id":"c","turns":[{"speaker":"user","text":"yo"}]})" << "\n";
    }
    try {
      load_dialogues(dir / "bad.jsonl");
      FAIL("expected an error");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("record 2") != std::string::npos);
    }
    {
      std::ofstream f(dir / "dup.jsonl");
      f << R"({"id":"a","turns":[{"speaker":"user","text":"hi"}]})" << "\n";
      f << R"({"id":"a","turns":[{"speaker":"user","text":"hi"}]})" << "\n";
    }
    CHECK_THROWS_AS(load_dialogues(dir / "dup.jsonl"), FormatError);
    { std::ofstream f(dir / "empty.jsonl"); }
    CHECK_THROWS_AS(load_dialogues(dir / "empty.jsonl"), FormatError);
    CHECK_THROWS_AS(load_dialogues(dir / "missing.jsonl"), FormatError);
  }

  TEST_CASE("multiwoz import handles both layouts") {
    const auto dir = testing::fresh_dir("mwoz");
    {
      std::ofstream f(dir / "dialogues_001.json");
      f << R"([{"dialogue_id":"PMUL4398.json","services":["restaurant","hotel"],"turns":[
            {"speaker":"USER","turn_id":"0","utterance":"i need a place to dine in the centre thats expensive"},
            {"speaker":"SYSTEM","turn_id":"1","utterance":"I have several options for you; do you prefer African, Asian, or British food?"}]}])";
    }
    const auto a = import_multiwoz(dir / "dialogues_001.json");
    REQUIRE(a.size() == 1);
    CHECK(a[0].id == "PMUL4398.json");
    CHECK(a[0].turns[0].speaker == Speaker::user);
    CHECK(a[0].turns[1].speaker == Speaker::system);
    CHECK(a[0].domain_tags == std::vector<std::string>{"restaurant", "hotel"});
    {
      std::ofstream f(dir / "hf.jsonl");
      f << R"({"dialogue_id":"SNG0129.json","services":["hotel"],"turns":{"speaker":[0,1,0],"utterance":["I need a cheap hotel.","Sure.","Thanks."]}})"
        << "\n";
    }
    const auto b = import_multiwoz(dir / "hf.jsonl");
    REQUIRE(b.size() == 1);
    CHECK(b[0].turns.size() == 3);
    CHECK(b[0].turns[2].speaker == Speaker::user);
  }

  TEST_CASE("templated update contradicts the last constraint in one sentence") {
    DialogueSource d{"SNG0001.json",
                     {{Speaker::user, "I am looking for a hotel."},
                      {Speaker::system, "Any price range?"},
                      {Speaker::user, "Something cheap please."}},
                     {"hotel"}};
    const auto pair = generate_update(d, UpdateMode::templated);
    CHECK(pair.template_id == "T01");
    CHECK(pair.g1_text == "Something cheap please.");
    CHECK(text::count_sentences(pair.g2_text) == 1);
    CHECK(pair.g1_text != pair.g2_text);
    CHECK(pair.g1_id == "SNG0001.json:G1");
    CHECK(pair.g2_id == "SNG0001.json:G2");
    CHECK(pair.g2_text.find("expensive") != std::string::npos);
    for (const auto& t : update_templates()) CHECK(text::count_sentences(t.update) == 1);
    CHECK(text::count_sentences(fallback_template().update) == 1);
  }

  TEST_CASE("template fixture file matches the compiled table") {
    const auto file = json::parse(read_text(std::filesystem::path(LATCHBENCH_SOURCE_DIR) / "data/update_templates.json"));
    CHECK(file == update_templates_json());
  }

  TEST_CASE("dynamic update uses the backend and enforces one sentence") {
    DialogueSource d{"D1", {{Speaker::user, "I want a train to London."}}, {}};
    backend::ScriptedBackend ok("s", {{"Reference: D1", "Actually I would rather go to Oxford."}});
    const auto pair = generate_update(d, UpdateMode::dynamic, &ok);
    CHECK(pair.g2_text == "Actually I would rather go to Oxford.");
    CHECK(pair.template_id.empty());

    backend::ScriptedBackend twice("s", {{"Reference: D1", "First sentence. Second sentence."}});
    CHECK_THROWS_AS(generate_update(d, UpdateMode::dynamic, &twice), DomainError);
    CHECK(twice.counters().calls == 2);
    CHECK_THROWS_AS(generate_update(d, UpdateMode::dynamic, nullptr), ConfigError);
  }

  TEST_CASE("make_noise determinism, length and purity") {
    const std::vector<std::string> forbidden = {"Pegasus"};
    const auto a = make_noise(7, 500, forbidden);
    CHECK(a.text == make_noise(7, 500, forbidden).text);
    CHECK(a.text != make_noise(8, 500, forbidden).text);
    const auto big = make_noise(7, 1000, forbidden);
    const auto est = estimate_tokens(big.text);
    CHECK(est >= 980);
    CHECK(est <= 1020);
    CHECK(a.text.find("Pegasus") == std::string::npos);
    // A forbidden string that every line must contain cannot be avoided.
    const std::vector<std::string> impossible = {" "};
    CHECK_THROWS_AS(make_noise(7, 100, impossible), DomainError);
  }

  TEST_CASE("place_at_fraction") {
    const std::vector<std::string> none;
    std::vector<Block> noise{{BlockKind::noise, Speaker::system, make_noise(1, 10000, none).text, {}}};
    Block payload{BlockKind::payload, Speaker::system, "PAYLOAD", "P"};

    const auto first = place_at_fraction(noise, payload, 0.0);
    CHECK(first.placed_offset_tokens == 0);
    CHECK(first.blocks.front().payload_id == "P");

    const auto mid = place_at_fraction(noise, payload, 0.5);
    CHECK(mid.placed_offset_tokens >= 4800);
    CHECK(mid.placed_offset_tokens <= 5200);

    const auto q1 = place_at_fraction(noise, payload, 0.25);
    const auto q3 = place_at_fraction(noise, payload, 0.75);
    CHECK(q1.placed_offset_tokens == doctest::Approx(2500).epsilon(0.02));
    CHECK(q3.placed_offset_tokens == doctest::Approx(7500).epsilon(0.02));

    // A single long dialogue turn cannot be split.
    std::vector<Block> dialogue{{BlockKind::dialogue, Speaker::user, std::string(40000, 'a'), {}}};
    CHECK_THROWS_AS(place_at_fraction(dialogue, payload, 0.5), GeometryError);
    CHECK_THROWS_AS(place_at_fraction(noise, payload, 1.5), DomainError);
  }

  TEST_CASE("build_shallow") {
    const auto t = testing::forge_one(Tier::shallow, 3, 11);
    CHECK(t.token_count >= 1960);
    CHECK(t.token_count <= 2040);
    CHECK(t.find_seed(t.intent_pair.g2_id)->position_fraction >= 0.9);
    CHECK(fraction(t, t.intent_pair.g2_id) >= 0.9);
    CHECK(fraction(t, "F1") >= 0.9);
    CHECK(t == testing::forge_one(Tier::shallow, 3, 11));
    CHECK(check_invariants(t).empty());

    DialogueSource huge{"H", {{Speaker::user, std::string(9000, 'x') + " cheap"}}, {}};
    CHECK_THROWS_AS(build_shallow(huge, generate_update(huge, UpdateMode::templated), 1), GeometryError);
  }

  TEST_CASE("build_high_entropy") {
    const auto t = testing::forge_one(Tier::high_entropy, 5, 11);
    CHECK(t.find_seed("F1")->position_fraction == 0.5);
    CHECK(std::abs(fraction(t, "F1") - 0.5) <= 0.02);
    CHECK(std::abs(static_cast<double>(t.token_count) - 10000.0) <= 200.0);
    for (const auto& n : noise_texts(t)) CHECK(n.find(t.expected_signal) == std::string::npos);
    const auto g2 = t.find_payload(t.intent_pair.g2_id);
    REQUIRE(g2);
    CHECK(t.assembled_turns[*g2].text.find("ADMINISTRATIVE PROCEDURE NOTICE") == 0);
    CHECK(check_invariants(t).empty());
  }

  TEST_CASE("build_hijack") {
    const auto t = testing::forge_one(Tier::hijack, 2, 11);
    std::vector<std::size_t> fact_offsets;
    for (const auto& s : t.seeds) {
      if (s.payload_kind == PayloadKind::decoy) CHECK(s.position_fraction <= 0.05);
      if (s.payload_kind == PayloadKind::fact) {
        fact_offsets.push_back(s.placed_offset_tokens);
        CHECK(std::abs(fraction(t, s.payload_id) - s.position_fraction) <= 0.02);
      }
    }
    REQUIRE(fact_offsets.size() == 3);
    CHECK(fact_offsets[0] != fact_offsets[1]);
    CHECK(fact_offsets[1] != fact_offsets[2]);
    CHECK(t.expected_signal == t.fact_chain->answer_signal);
    for (const auto& turn : t.assembled_turns) {
      if (turn.kind == BlockKind::noise || turn.payload_id.starts_with("D")) {
        CHECK(turn.text.find(t.expected_signal) == std::string::npos);
      }
    }
    CHECK(check_invariants(t).empty());

    const auto corpus = testing::synthetic_corpus(1, 1);
    const auto pair = generate_update(corpus[0], UpdateMode::templated);
    CHECK_THROWS_AS(build_hijack(corpus[0], pair, make_fact_chain(1, 2, "Alpha Hall"), 1), DomainError);
  }

  TEST_CASE("build_equidistant symmetry and mirror") {
    IntentPair pair{"I want a cheap hotel in the north.", "I want an expensive hotel in the south.", "E1:G1", "E1:G2",
                    "contradicts", "T01"};
    const auto t = build_equidistant(pair, 99);
    const auto g1 = t.find_seed("E1:G1")->placed_offset_tokens;
    const auto g2_index = *t.find_payload("E1:G2");
    const auto g2_end = t.offset_of_turn(g2_index) + estimate_tokens(t.assembled_turns[g2_index].text);
    CHECK(std::abs(static_cast<double>(g1) - 2500.0) <= 200.0);
    CHECK(std::abs(static_cast<double>(t.find_seed("E1:G2")->placed_offset_tokens) - 7500.0) <= 200.0);
    const double residual = std::abs(static_cast<double>(g1) - static_cast<double>(t.token_count - g2_end));
    CHECK(residual <= 100.0);
    CHECK(check_invariants(t).empty());

    IntentPair swapped{pair.g2_text, pair.g1_text, "E1:G1", "E1:G2", "contradicts", "T01"};
    const auto m = build_equidistant(swapped, 99);
    CHECK(m.find_seed("E1:G1")->placed_offset_tokens == doctest::Approx(g1).epsilon(0.01));
    const auto m_g2 = *m.find_payload("E1:G2");
    const auto m_end = m.offset_of_turn(m_g2) + estimate_tokens(m.assembled_turns[m_g2].text);
    CHECK(std::abs(static_cast<double>(m.find_seed("E1:G1")->placed_offset_tokens) -
                   static_cast<double>(m.token_count - m_end)) <= 100.0);
  }

  TEST_CASE("forging is independent of corpus order") {
    auto corpus = testing::synthetic_corpus(6, 3);
    auto forge_all = [](const std::vector<DialogueSource>& ds) {
      std::map<std::string, std::string> out;
      for (const auto& d : ds) {
        const auto pair = generate_update(d, UpdateMode::templated);
        const auto t = build_high_entropy(d, pair, derive_seed(42, d.id, "high_entropy"));
        out[t.id] = canonical_dump(to_json(t));
      }
      return out;
    };
    const auto a = forge_all(corpus);
    std::reverse(corpus.begin(), corpus.end());
    CHECK(a == forge_all(corpus));
  }

  TEST_CASE("trajectory JSON round trip") {
    const auto t = testing::forge_one(Tier::hijack, 1, 5);
    CHECK(trajectory_from_json(to_json(t)) == t);
    const auto dir = testing::fresh_dir("traj");
    save_trajectories(dir / "t.jsonl", {t});
    CHECK(load_trajectories(dir / "t.jsonl").front() == t);
  }
}
