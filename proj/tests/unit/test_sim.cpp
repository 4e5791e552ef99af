#include <doctest.h>

#include <cmath>

#include "latchbench/core/hash.hpp"
#include "latchbench/sim/latch.hpp"
#include "latchbench/strategy/protocol.hpp"
#include "support.hpp"

using namespace latchbench;
using namespace latchbench::sim;

namespace {

struct Freq {
  double success = 0, latched = 0, refusal = 0, ungrounded = 0;
};

Freq frequencies(const Scene& scene, const LatchParams& latch, const SimulatorOptions& options, int n,
                 std::size_t steps = 0) {
  Freq f;
  for (int i = 0; i < n; ++i) {
    switch (draw_outcome(scene, latch, options, steps, derive_seed(99, std::to_string(i))).outcome) {
      case Outcome::success: f.success += 1; break;
      case Outcome::latched: f.latched += 1; break;
      case Outcome::refusal: f.refusal += 1; break;
      case Outcome::ungrounded: f.ungrounded += 1; break;
    }
  }
  f.success /= n;
  f.latched /= n;
  f.refusal /= n;
  f.ungrounded /= n;
  return f;
}

double binomial_sd(double p, int n) { return std::sqrt(p * (1 - p) / n); }

}  // namespace

TEST_SUITE("sim") {
  TEST_CASE("retrieval curve") {
    const CurveParams c{1.0, 0.2};
    CHECK(retrieval_prob(c, 0.0) == doctest::Approx(0.45));
    CHECK(retrieval_prob(c, 0.5) == doctest::Approx(0.2));
    CHECK(retrieval_prob(c, 1.0) == doctest::Approx(0.45));
    CHECK(retrieval_prob({4.0, 0.5}, 0.0) == 1.0);
    CHECK(retrieval_prob({-4.0, 0.0}, 0.0) == 0.0);
    CHECK_THROWS_AS(retrieval_prob(c, 1.2), DomainError);
    CHECK_THROWS_AS(retrieval_prob(c, -0.1), DomainError);
  }

  TEST_CASE("joint success is the product") {
    const std::vector<double> p{0.9, 0.9, 0.9};
    CHECK(predicted_joint_success(p) == doctest::Approx(0.729));
    const std::vector<double> empty;
    CHECK_THROWS_AS(predicted_joint_success(empty), DomainError);
    const std::vector<double> bad{0.5, 1.5};
    CHECK_THROWS_AS(predicted_joint_success(bad), DomainError);
  }

  TEST_CASE("single pass frequencies match the closed form") {
    Scene scene{{0.8, 0.7}, {true, true}, 0.6, 0.9};
    LatchParams latch{2.0, 1.0, 0.1, false, false};
    const int n = 40000;
    const auto f = frequencies(scene, latch, {}, n);
    const double commit_g2 = 0.9 * (1 - 0.6 * 2.0 / 3.0);
    const double success = 0.9 * 0.8 * 0.7 * commit_g2;
    const double latched = 0.9 * (1 - commit_g2);
    CHECK(std::abs(f.success - success) <= 4 * binomial_sd(success, n));
    CHECK(std::abs(f.latched - latched) <= 4 * binomial_sd(latched, n));
    CHECK(std::abs(f.refusal - 0.1) <= 4 * binomial_sd(0.1, n));
  }

  TEST_CASE("chain penalty scales every hop after the first") {
    Scene scene{{0.9, 0.9, 0.9}, {}, 0.0, 1.0};
    SimulatorOptions o;
    o.chain_penalty = 0.8;
    const int n = 40000;
    const auto f = frequencies(scene, {}, o, n);
    const double expected = 0.9 * 0.72 * 0.72;
    CHECK(std::abs(f.success - expected) <= 4 * binomial_sd(expected, n));
  }

  TEST_CASE("redirect purges g1 and grounds named facts") {
    Scene scene{{0.01, 0.01, 0.01}, {true, true, true}, 1.0, 0.0};
    LatchParams latch;
    latch.redirect = true;
    SimulatorOptions o;
    o.redirect_grounding = 0.9;
    const int n = 40000;
    const auto f = frequencies(scene, latch, o, n, 3);
    CHECK(f.latched == 0.0);
    CHECK(std::abs(f.success - 0.729) <= 4 * binomial_sd(0.729, n));
    // Extra steps beyond three compete for attention.
    o.competition_penalty = 0.05;
    const auto v = frequencies(scene, latch, o, n, 12);
    const double g = 0.9 * std::pow(0.95, 9);
    CHECK(std::abs(v.success - g * g * g) <= 4 * binomial_sd(g * g * g, n));
  }

  TEST_CASE("post-hoc correction recovers anything above the floor") {
    Scene scene{{0.35, 0.4}, {}, 1.0, 0.3};
    LatchParams latch;
    latch.posthoc_correct = true;
    const auto f = frequencies(scene, latch, {}, 2000);
    CHECK(f.success == 1.0);
    Scene low{{0.1}, {}, 0.0, 1.0};
    const int n = 40000;
    const auto g = frequencies(low, latch, {}, n);
    const double expected = 1 - 0.9 * 0.9;
    CHECK(std::abs(g.success - expected) <= 4 * binomial_sd(expected, n));
  }

  TEST_CASE("draws are deterministic per seed") {
    Scene scene{{0.5}, {}, 0.5, 0.5};
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto a = draw_outcome(scene, {}, {}, 0, s);
      const auto b = draw_outcome(scene, {}, {}, 0, s);
      CHECK(a.outcome == b.outcome);
    }
  }

  TEST_CASE("config validation and round trip") {
    SimulatorConfig c;
    c.latch.refusal_rate = 0.18;
    c.options.overrides["G2"] = 1.0;
    const auto back = simulator_config_from_json(to_json(c));
    CHECK(back.latch.refusal_rate == 0.18);
    CHECK(back.options.overrides.at("G2") == 1.0);
    CHECK_THROWS_AS(simulator_config_from_json(json::parse(R"({"latch":{"refusal_rate":1.5}})")), ConfigError);
    CHECK_THROWS_AS(simulator_config_from_json(json::parse(R"({"chain_penalty":0})")), ConfigError);
    CHECK_THROWS_AS(simulator_config_from_json(json::parse(R"({"overrides":{"F*":2}})")), ConfigError);
  }

  TEST_CASE("scene uses overrides in priority order") {
    const auto t = testing::forge_one(forge::Tier::hijack, 0, 4);
    SimulatorOptions o;
    o.overrides = {{"F*", 0.3}, {"F2", 0.7}, {"G1", 0.1}, {"G2", 0.95}};
    const auto s = scene_for(t, {}, o);
    REQUIRE(s.fact_probs.size() == 3);
    CHECK(s.fact_probs[0] == 0.3);
    CHECK(s.fact_probs[1] == 0.7);
    CHECK(s.p_g1 == 0.1);
    CHECK(s.p_g2 == 0.95);
    const auto plain = scene_for(t, {1.0, 0.2}, {});
    const double x = static_cast<double>(t.find_seed("F1")->placed_offset_tokens) / t.token_count;
    CHECK(plain.fact_probs[0] == doctest::Approx(retrieval_prob({1.0, 0.2}, x)));
  }

  TEST_CASE("synthesized SOPs satisfy their tier contract") {
    const auto t = testing::forge_one(forge::Tier::hijack, 1, 4);
    for (auto tier : {strategy::GranularityTier::hyper_compressed, strategy::GranularityTier::optimal,
                      strategy::GranularityTier::verbose}) {
      const auto p = strategy::parse_protocol(synthesize_sop(t, tier), tier, "syn");
      CHECK(strategy::protocol_violations(p, t.intent_pair).empty());
    }
  }

  TEST_CASE("response texts carry the right signal") {
    const auto t = testing::forge_one(forge::Tier::hijack, 2, 4);
    SimulatorConfig good;
    good.options.overrides = {{"F*", 1.0}, {"G1", 0.0}, {"G2", 1.0}};
    const auto r = simulate_response(t, good, 1);
    CHECK(r.draw.outcome == Outcome::success);
    CHECK(r.text.find(t.expected_signal) != std::string::npos);
    SimulatorConfig latched;
    latched.options.overrides = {{"F*", 1.0}, {"G2", 0.0}};
    const auto l = simulate_response(t, latched, 1);
    CHECK(l.draw.outcome == Outcome::latched);
    CHECK(l.text.find(t.intent_pair.g1_text) != std::string::npos);
    CHECK(l.text.find(t.expected_signal) == std::string::npos);
  }
}
