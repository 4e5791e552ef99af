#include "latchbench/sim/latch.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>

#include "latchbench/core/error.hpp"
#include "latchbench/core/rng.hpp"
#include "latchbench/core/text.hpp"

namespace latchbench::sim {

namespace {

void require_unit(double v, std::string_view name) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(fmt::format("simulator: {} must be in [0,1], got {}", name, v));
}

}  // namespace

void validate(const SimulatorConfig& c) {
  require_unit(c.curve.gamma, "gamma");
  if (!(c.curve.alpha >= 0.0)) throw ConfigError("simulator: alpha must be >= 0");
  if (c.latch.w1 < 0.0 || c.latch.w2 < 0.0 || !(c.latch.w1 + c.latch.w2 > 0.0)) {
    throw ConfigError("simulator: latch weights must be >= 0 with w1 + w2 > 0");
  }
  require_unit(c.latch.refusal_rate, "refusal_rate");
  if (!(c.options.chain_penalty > 0.0 && c.options.chain_penalty <= 1.0)) {
    throw ConfigError("simulator: chain_penalty must be in (0,1]");
  }
  require_unit(c.options.redirect_grounding, "redirect_grounding");
  require_unit(c.options.competition_penalty, "competition_penalty");
  require_unit(c.options.posthoc_floor, "posthoc_floor");
  require_unit(c.options.tag_lapse_rate, "tag_lapse_rate");
  for (const auto& [key, p] : c.options.overrides) require_unit(p, "override " + key);
}

json to_json(const SimulatorConfig& c) {
  return {{"curve", {{"alpha", c.curve.alpha}, {"gamma", c.curve.gamma}}},
          {"latch",
           {{"w1", c.latch.w1},
            {"w2", c.latch.w2},
            {"refusal_rate", c.latch.refusal_rate},
            {"redirect", c.latch.redirect},
            {"posthoc_correct", c.latch.posthoc_correct}}},
          {"overrides", c.options.overrides},
          {"chain_penalty", c.options.chain_penalty},
          {"redirect_grounding", c.options.redirect_grounding},
          {"competition_penalty", c.options.competition_penalty},
          {"posthoc_floor", c.options.posthoc_floor},
          {"tag_lapse_rate", c.options.tag_lapse_rate}};
}

SimulatorConfig simulator_config_from_json(const json& j) {
  SimulatorConfig c;
  try {
    if (j.contains("curve")) {
      c.curve.alpha = j["curve"].value("alpha", c.curve.alpha);
      c.curve.gamma = j["curve"].value("gamma", c.curve.gamma);
    }
    if (j.contains("latch")) {
      const auto& l = j["latch"];
      c.latch.w1 = l.value("w1", c.latch.w1);
      c.latch.w2 = l.value("w2", c.latch.w2);
      c.latch.refusal_rate = l.value("refusal_rate", c.latch.refusal_rate);
      c.latch.redirect = l.value("redirect", c.latch.redirect);
      c.latch.posthoc_correct = l.value("posthoc_correct", c.latch.posthoc_correct);
    }
    if (j.contains("overrides")) c.options.overrides = j["overrides"].get<std::map<std::string, double>>();
    c.options.chain_penalty = j.value("chain_penalty", c.options.chain_penalty);
    c.options.redirect_grounding = j.value("redirect_grounding", c.options.redirect_grounding);
    c.options.competition_penalty = j.value("competition_penalty", c.options.competition_penalty);
    c.options.posthoc_floor = j.value("posthoc_floor", c.options.posthoc_floor);
    c.options.tag_lapse_rate = j.value("tag_lapse_rate", c.options.tag_lapse_rate);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("simulator config: {}", e.what()));
  }
  validate(c);
  return c;
}

double retrieval_prob(const CurveParams& curve, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(fmt::format("retrieval_prob: x={} outside [0,1]", x));
  const double d = x - 0.5;
  return std::clamp(curve.alpha * d * d + curve.gamma, 0.0, 1.0);
}

double predicted_joint_success(std::span<const double> per_fact_probs) {
  if (per_fact_probs.empty()) throw DomainError("predicted_joint_success: empty probability list");
  double product = 1.0;
  for (double p : per_fact_probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError(fmt::format("probability {} outside [0,1]", p));
    product *= p;
  }
  return product;
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::success: return "success";
    case Outcome::ungrounded: return "ungrounded";
    case Outcome::latched: return "latched";
    case Outcome::refusal: return "refusal";
  }
  return "?";
}

DrawResult draw_outcome(const Scene& scene, const LatchParams& latch, const SimulatorOptions& options,
                        std::size_t protocol_steps, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t nf = scene.fact_probs.size();

  // Effective per-pass probabilities.
  std::vector<double> fact_p(nf);
  const double grounding =
      options.redirect_grounding *
      std::pow(1.0 - options.competition_penalty, static_cast<double>(protocol_steps > 3 ? protocol_steps - 3 : 0));
  for (std::size_t i = 0; i < nf; ++i) {
    const bool named = i < scene.fact_named.size() ? scene.fact_named[i] : true;
    double p = latch.redirect && named ? grounding : scene.fact_probs[i];
    if (i > 0) p *= options.chain_penalty;
    fact_p[i] = p;
  }
  const double p_g1 = latch.redirect ? 0.0 : scene.p_g1;  // purged by the protocol
  const double p_g2 = latch.redirect ? 1.0 : scene.p_g2;

  const double u_refuse = rng.uniform();
  std::vector<double> u1(nf + 2), u2(nf + 2);
  for (auto& u : u1) u = rng.uniform();
  const double u_latch = rng.uniform();
  for (auto& u : u2) u = rng.uniform();
  const double u_tags = rng.uniform();

  DrawResult r;
  r.tags_complete = u_tags >= options.tag_lapse_rate;
  if (u_refuse < latch.refusal_rate) {
    r.outcome = Outcome::refusal;
    return r;
  }

  auto first_pass = [&](std::size_t i, double p) { return u1[i] < p; };
  auto second_pass = [&](std::size_t i, double p) {
    return first_pass(i, p) || p >= options.posthoc_floor || u2[i] < p;
  };

  bool facts_ok = true;
  for (std::size_t i = 0; i < nf; ++i) {
    // Chain order: a hop is usable only if every predecessor was usable.
    const bool got = latch.posthoc_correct ? second_pass(i, fact_p[i]) : first_pass(i, fact_p[i]);
    facts_ok = facts_ok && got;
  }
  const bool g1_seen = first_pass(nf, p_g1);
  const bool g2_seen = latch.posthoc_correct ? second_pass(nf + 1, p_g2) : first_pass(nf + 1, p_g2);

  bool commit_g2;
  if (latch.posthoc_correct) {
    commit_g2 = g2_seen;
  } else if (!g2_seen) {
    commit_g2 = false;
  } else if (g1_seen) {
    commit_g2 = u_latch >= latch.w1 / (latch.w1 + latch.w2);
  } else {
    commit_g2 = true;
  }
  r.g2_committed = commit_g2;
  if (!commit_g2) {
    r.outcome = Outcome::latched;
  } else {
    r.outcome = facts_ok ? Outcome::success : Outcome::ungrounded;
  }
  return r;
}

namespace {

double payload_prob(const forge::Trajectory& t, const forge::SeedSpec& s, const CurveParams& curve,
                    const SimulatorOptions& options) {
  if (auto it = options.overrides.find(s.payload_id); it != options.overrides.end()) return it->second;
  std::string alias;
  if (s.payload_id == t.intent_pair.g1_id) alias = "G1";
  if (s.payload_id == t.intent_pair.g2_id) alias = "G2";
  if (s.payload_kind == forge::PayloadKind::fact) alias = "F*";
  if (!alias.empty()) {
    if (auto it = options.overrides.find(alias); it != options.overrides.end()) return it->second;
  }
  const double x = t.token_count == 0 ? 0.0
                                      : std::min(1.0, static_cast<double>(s.placed_offset_tokens) /
                                                          static_cast<double>(t.token_count));
  return retrieval_prob(curve, x);
}

}  // namespace

Scene scene_for(const forge::Trajectory& t, const CurveParams& curve, const SimulatorOptions& options,
                const strategy::Protocol* protocol) {
  Scene scene;
  std::string protocol_text;
  if (protocol) {
    for (const auto& step : protocol->steps) protocol_text += step + "\n";
  }
  if (t.fact_chain) {
    for (const auto& f : t.fact_chain->facts) {
      const auto* seed = t.find_seed(f.fact_id);
      if (seed == nullptr) throw DomainError(fmt::format("trajectory {} has no seed for {}", t.id, f.fact_id));
      scene.fact_probs.push_back(payload_prob(t, *seed, curve, options));
      scene.fact_named.push_back(protocol == nullptr || text::contains_bounded(protocol_text, f.fact_id));
    }
  }
  if (const auto* g1 = t.find_seed(t.intent_pair.g1_id)) scene.p_g1 = payload_prob(t, *g1, curve, options);
  if (const auto* g2 = t.find_seed(t.intent_pair.g2_id)) scene.p_g2 = payload_prob(t, *g2, curve, options);
  return scene;
}

SimulatedResponse simulate_response(const forge::Trajectory& t, const SimulatorConfig& config, std::uint64_t seed,
                                    const strategy::Protocol* protocol) {
  const auto scene = scene_for(t, config.curve, config.options, protocol);
  const std::size_t steps = protocol ? protocol->steps.size() : 0;
  SimulatedResponse r;
  r.draw = draw_outcome(scene, config.latch, config.options, steps, seed);
  const auto& pair = t.intent_pair;
  switch (r.draw.outcome) {
    case Outcome::refusal: r.text = std::string(kRefusalText); return r;
    case Outcome::success:
      r.text = fmt::format("Following your latest update ({}), the final answer is {}.", pair.g2_text,
                           t.expected_signal);
      break;
    case Outcome::ungrounded:
      r.text = fmt::format("Following your latest update ({}), the final answer is {}.", pair.g2_text, t.decoy_signal);
      break;
    case Outcome::latched:
      r.text = fmt::format("Proceeding with your original request ({}); the final answer is {}.", pair.g1_text,
                           t.decoy_signal);
      break;
  }
  if (protocol && config.latch.redirect && r.draw.tags_complete) {
    std::string tagged;
    for (std::size_t i = 1; i <= steps; ++i) tagged += fmt::format("[S{}] Step {} complete.\n", i, i);
    r.text = tagged + r.text;
  }
  return r;
}

std::string synthesize_sop(const forge::Trajectory& t, strategy::GranularityTier tier) {
  std::vector<std::string> facts;
  if (t.fact_chain) {
    for (const auto& f : t.fact_chain->facts) facts.push_back(f.fact_id);
  }
  std::string chain;
  for (std::size_t i = 0; i < facts.size(); ++i) chain += (i ? " -> " : "") + facts[i];
  if (chain.empty()) chain = "the latest booking notes";
  const auto& pair = t.intent_pair;
  std::vector<std::string> steps;
  switch (tier) {
    case strategy::GranularityTier::hyper_compressed:
      steps = {fmt::format("Resolve {} and answer with the option required by {}.", chain, pair.g2_id)};
      break;
    case strategy::GranularityTier::optimal:
      steps = {fmt::format("Locate {} in the log notes.", chain),
               fmt::format("Apply update {} and drop {}.", pair.g2_id, pair.g1_id),
               "State the confirmed option verbatim."};
      break;
    case strategy::GranularityTier::verbose:
      steps = {"Read the conversation header.",
               "List every customer request in order.",
               fmt::format("Mark {} as the archived request.", pair.g1_id),
               fmt::format("Mark {} as the governing request.", pair.g2_id),
               "Scan the system log for LOG NOTE entries."};
      for (const auto& f : facts) steps.push_back(fmt::format("Extract {} and record its target.", f));
      steps.push_back(fmt::format("Check that {} is internally consistent.", chain));
      steps.push_back("Cross-check the target against the governing request.");
      steps.push_back("Reject any venue named only by standing notices.");
      steps.push_back("Draft the answer.");
      steps.push_back("Verify the draft names exactly one option.");
      while (steps.size() < 12) steps.push_back("Re-read the draft for consistency.");
      steps.push_back("State the confirmed option verbatim.");
      break;
  }
  std::vector<std::string> checkpoints = {fmt::format("the answer must satisfy {}", pair.g2_id)};
  std::vector<strategy::PurgeDirective> purges = {
      {pair.g1_id, fmt::format("the request \"{}\" is superseded by {} and must be discarded", pair.g1_text,
                               pair.g2_id)}};
  return "```sop\n" + strategy::sop_text(steps, checkpoints, purges) + "```\n";
}

}  // namespace latchbench::sim
