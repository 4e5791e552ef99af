#include <doctest.h>

#include "latchbench/backend/scripted.hpp"
#include "latchbench/backend/synthetic.hpp"
#include "latchbench/sim/latch.hpp"
#include "latchbench/strategy/engine.hpp"
#include "latchbench/strategy/prompts.hpp"
#include "latchbench/core/jsonl.hpp"
#include "latchbench/forge/update.hpp"
#include "latchbench/strategy/protocol.hpp"
#include "support.hpp"

using namespace latchbench;
using namespace latchbench::strategy;
using backend::ScriptedBackend;

namespace {

std::string good_sop(const forge::Trajectory& t) {
  return "Here you go.\n```sop\nSTEP 1: Locate F1 -> F2 -> F3.\nSTEP 2: Apply " + t.intent_pair.g2_id +
         ".\nSTEP 3: Answer verbatim.\nCHECKPOINT: answer satisfies the update\nPURGE intent=" + t.intent_pair.g1_id +
         ": discard the earlier request\n```\n";
}

std::string ref(const forge::Trajectory& t) { return reference_line(t); }

}  // namespace

TEST_SUITE("strategy") {
  TEST_CASE("protocol parsing") {
    const auto t = testing::forge_one(forge::Tier::hijack, 0, 2);
    const auto p = parse_protocol(good_sop(t), GranularityTier::optimal, "arch");
    CHECK(p.steps.size() == 3);
    CHECK(p.checkpoints.size() == 1);
    REQUIRE(p.purge_directives.size() == 1);
    CHECK(p.purge_directives[0].intent_id == t.intent_pair.g1_id);
    CHECK(p.protocol_id.starts_with("sop-"));
    CHECK(p.protocol_id == parse_protocol(good_sop(t), GranularityTier::optimal, "other").protocol_id);
    CHECK(protocol_violations(p, t.intent_pair).empty());
    CHECK(protocol_from_json(to_json(p)) == p);
    CHECK(render_protocol(p).find("STEP 2:") != std::string::npos);

    CHECK_THROWS_AS(parse_protocol("no steps at all", GranularityTier::optimal, "a"), ProtocolError);
    CHECK_THROWS_AS(parse_protocol("STEP 1: a\nSTEP 3: b", GranularityTier::optimal, "a"), ProtocolError);

    const auto two = parse_protocol("STEP 1: a\nSTEP 2: b\nCHECKPOINT: c\nPURGE intent=" + t.intent_pair.g1_id + ": x",
                                    GranularityTier::optimal, "a");
    const auto v = protocol_violations(two, t.intent_pair);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("step count") != std::string::npos);
    const auto nopurge = parse_protocol("STEP 1: a\nSTEP 2: b\nSTEP 3: c\nCHECKPOINT: c", GranularityTier::optimal, "a");
    CHECK(protocol_violations(nopurge, t.intent_pair) == std::vector<std::string>{"missing purge directive"});
    const auto hyper = parse_protocol("STEP 1: a\nPURGE intent=" + t.intent_pair.g1_id + ": x",
                                      GranularityTier::hyper_compressed, "a");
    CHECK(protocol_violations(hyper, t.intent_pair).empty());
    CHECK(step_bounds(GranularityTier::verbose).min == 10);
    CHECK_FALSE(step_bounds(GranularityTier::verbose).max.has_value());
  }

  TEST_CASE("judge prompt round trip") {
    const auto p = judge_prompt("Resp with ? marks", "Upd: switch");
    CHECK(p == "Does this agent response: Resp with ? marks correctly follow this user update: Upd: switch? Return "
               "ONLY '1' for YES or '0' for NO.");
    const auto back = parse_judge_prompt(p);
    REQUIRE(back);
    CHECK(back->first == "Resp with ? marks");
    CHECK(back->second == "Upd: switch");
    CHECK(parse_judge_prompt(judge_retry_prompt("a", "b"))->second == "b");
    CHECK_FALSE(parse_judge_prompt("hello").has_value());
  }

  TEST_CASE("history rendering") {
    const auto t = testing::forge_one(forge::Tier::high_entropy, 1, 2);
    const auto msgs = render_history(t, kAgentSystemPrompt);
    REQUIRE(msgs.size() == t.assembled_turns.size() + 1);
    CHECK(msgs[0].role == backend::Role::system);
    for (std::size_t i = 0; i < t.assembled_turns.size(); ++i) {
      const auto& turn = t.assembled_turns[i];
      if (turn.kind == forge::BlockKind::noise) CHECK(msgs[i + 1].role == backend::Role::assistant);
      if (turn.kind == forge::BlockKind::dialogue && turn.speaker == forge::Speaker::user) {
        CHECK(msgs[i + 1].role == backend::Role::user);
      }
    }
    const auto windowed = render_history(t, kAgentSystemPrompt, 2);
    CHECK(windowed.size() == 3);
  }

  TEST_CASE("vanilla run") {
    const auto t = testing::forge_one(forge::Tier::shallow, 0, 2);
    ScriptedBackend b("scripted", {{ref(t), "final answer"}});
    const auto r = run_vanilla(t, b, 5);
    CHECK(r.final_response == "final answer");
    CHECK(r.call_count == 1);
    CHECK(r.prompts.size() == 1);
    CHECK(r.label == "vanilla");
    CHECK(r.prompt_version == std::string(kPromptVersion));
    CHECK_FALSE(r.error);

    ScriptedBackend miss("scripted", {{"Reference: nope", "x"}});
    const auto e = run_vanilla(t, miss, 5);
    REQUIRE(e.error);
    CHECK(e.error->stage == "vanilla");
    CHECK(e.error->kind == "pattern_miss");
    CHECK(e.final_response.empty());
  }

  TEST_CASE("ssrp embeds the exact protocol in the executive prompt") {
    const auto t = testing::forge_one(forge::Tier::hijack, 0, 2);
    ScriptedBackend arch("arch", {{ref(t) + "You are the Architect", good_sop(t)}});
    ScriptedBackend exec("exec", {{ref(t) + "Execute", "[S1] a\n[S2] b\n[S3] done"}});
    const auto r = run_ssrp(t, arch, exec, GranularityTier::optimal, 9);
    REQUIRE_FALSE(r.error);
    REQUIRE(r.protocol);
    CHECK(r.call_count == 2);
    CHECK(r.repair_calls == 0);
    REQUIRE(r.prompts.size() == 2);
    CHECK(r.prompts[1][0].content == executive_system_message(*r.protocol));
    CHECK(r.prompts[1][0].content.find(render_protocol(*r.protocol)) != std::string::npos);
    CHECK(r.final_response == "[S1] a\n[S2] b\n[S3] done");
    CHECK(r.granularity == "optimal");
    CHECK(r.secondary_backend == "exec");
  }

  TEST_CASE("architect gets one repair attempt") {
    const auto t = testing::forge_one(forge::Tier::hijack, 0, 2);
    ScriptedBackend arch("arch", {{ref(t) + "You are the Architect", "STEP 1: only one"},
                                  {ref(t) + "Your previous SOP", good_sop(t)}});
    ScriptedBackend exec("exec", {{ref(t), "ok"}});
    const auto r = run_ssrp(t, arch, exec, GranularityTier::optimal, 9);
    CHECK_FALSE(r.error);
    CHECK(r.repair_calls == 1);
    CHECK(r.call_count == 2);
    CHECK(r.prompts.size() == 3);

    ScriptedBackend bad("arch", {{ref(t), "I refuse to write steps."}});
    const auto f = run_ssrp(t, bad, exec, GranularityTier::optimal, 9);
    REQUIRE(f.error);
    CHECK(f.error->stage == "architect");
    CHECK(f.error->kind == "protocol");
    CHECK(f.repair_calls == 1);
    CHECK(exec.counters().calls == 1);
  }

  TEST_CASE("executive failure is attributed to its stage") {
    const auto t = testing::forge_one(forge::Tier::hijack, 0, 2);
    ScriptedBackend arch("arch", {{ref(t), good_sop(t)}});
    ScriptedBackend exec("exec", {{"Reference: other", "x"}});
    const auto r = run_ssrp(t, arch, exec, GranularityTier::optimal, 9);
    REQUIRE(r.error);
    CHECK(r.error->stage == "executive");
    CHECK(r.protocol.has_value());
  }

  TEST_CASE("reflexion makes two calls and keeps the critique") {
    const auto t = testing::forge_one(forge::Tier::shallow, 0, 2);
    ScriptedBackend b("b", {{ref(t) + "Task", "draft"}, {ref(t) + "Critique", "corrected"}});
    const auto r = run_reflexion(t, b, 1);
    CHECK(r.call_count == 2);
    REQUIRE(r.responses.size() == 2);
    CHECK(r.final_response == "corrected");
    CHECK(r.prompts[1].size() == r.prompts[0].size() + 2);
  }

  TEST_CASE("synthetic backend drives all strategies deterministically") {
    const auto t = testing::forge_one(forge::Tier::hijack, 3, 2);
    sim::SimulatorConfig c;
    c.options.overrides = {{"F*", 1.0}, {"G1", 0.0}, {"G2", 1.0}};
    backend::SyntheticBackend b("syn", c);
    const auto r = run_ssrp(t, b, b, GranularityTier::verbose, 4);
    REQUIRE_FALSE(r.error);
    CHECK(r.protocol->steps.size() >= 12);
    CHECK(r.final_response.find("[S1]") != std::string::npos);
    CHECK(r.final_response.find(t.expected_signal) != std::string::npos);
    CHECK(run_ssrp(t, b, b, GranularityTier::verbose, 4) == r);
  }

  TEST_CASE("run record serialization and blobs") {
    const auto corpus = testing::synthetic_corpus(1, 2);
    const auto t = forge::build_high_entropy(corpus[0], forge::generate_update(corpus[0], forge::UpdateMode::templated),
                                             7, 20000);
    ScriptedBackend b("b", {{ref(t), "x"}});
    auto r = run_vanilla(t, b, 3);
    r.wall_time_ms = 0;
    CHECK(run_record_from_json(to_json(r)) == r);
    const auto dir = testing::fresh_dir("blobs");
    const auto j = to_json(r, dir);
    const auto& ref0 = j["prompts"][0];
    REQUIRE(ref0.is_object());
    const auto blob = dir / (ref0["blob"].get<std::string>() + ".json");
    CHECK(std::filesystem::exists(blob));
    CHECK(run_record_from_json(j, dir) == r);
    CHECK_THROWS_AS(run_record_from_json(j), FormatError);
    // A tampered blob is rejected.
    write_text_atomic(blob, "[]");
    CHECK_THROWS(run_record_from_json(j, dir));
  }
}
