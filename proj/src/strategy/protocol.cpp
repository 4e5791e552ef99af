#include "latchbench/strategy/protocol.hpp"

#include <fmt/core.h>

#include <regex>

#include "latchbench/core/hash.hpp"
#include "latchbench/core/text.hpp"

namespace latchbench::strategy {

std::string_view to_string(GranularityTier t) {
  switch (t) {
    case GranularityTier::hyper_compressed: return "hyper_compressed";
    case GranularityTier::optimal: return "optimal";
    case GranularityTier::verbose: return "verbose";
  }
  return "?";
}

GranularityTier granularity_from_string(std::string_view s) {
  if (s == "hyper_compressed") return GranularityTier::hyper_compressed;
  if (s == "optimal") return GranularityTier::optimal;
  if (s == "verbose") return GranularityTier::verbose;
  throw ConfigError(fmt::format("unknown granularity tier '{}'", s));
}

StepBounds step_bounds(GranularityTier t) {
  switch (t) {
    case GranularityTier::hyper_compressed: return {1, 1};
    case GranularityTier::optimal: return {3, 3};
    case GranularityTier::verbose: return {10, std::nullopt};
  }
  return {};
}

json to_json(const Protocol& p) {
  json purges = json::array();
  for (const auto& d : p.purge_directives) purges.push_back({{"superseded_intent_id", d.intent_id}, {"text", d.text}});
  return {{"protocol_id", p.protocol_id},       {"steps", p.steps},
          {"checkpoints", p.checkpoints},       {"purge_directives", purges},
          {"tier", to_string(p.tier)},          {"source_architect", p.source_architect}};
}

Protocol protocol_from_json(const json& j) {
  Protocol p;
  p.protocol_id = j.at("protocol_id").get<std::string>();
  p.steps = j.at("steps").get<std::vector<std::string>>();
  p.checkpoints = j.at("checkpoints").get<std::vector<std::string>>();
  for (const auto& d : j.at("purge_directives")) {
    p.purge_directives.push_back({d.at("superseded_intent_id").get<std::string>(), d.at("text").get<std::string>()});
  }
  p.tier = granularity_from_string(j.at("tier").get<std::string>());
  p.source_architect = j.at("source_architect").get<std::string>();
  return p;
}

namespace {

std::string_view sop_body(std::string_view response) {
  const auto open = response.find("```sop");
  if (open == std::string_view::npos) return response;
  const auto body_start = response.find('\n', open);
  if (body_start == std::string_view::npos) return {};
  const auto close = response.find("```", body_start);
  return response.substr(body_start + 1, close == std::string_view::npos ? std::string_view::npos
                                                                          : close - body_start - 1);
}

std::string body_text(const Protocol& p) {
  return sop_text(p.steps, p.checkpoints, p.purge_directives);
}

}  // namespace

Protocol parse_protocol(std::string_view response, GranularityTier tier, const std::string& source_architect) {
  static const std::regex step_re(R"(^\s*STEP\s+(\d+)\s*[:.]\s*(.+?)\s*$)", std::regex::icase);
  static const std::regex check_re(R"(^\s*CHECKPOINT\s*:\s*(.+?)\s*$)", std::regex::icase);
  static const std::regex purge_re(R"(^\s*PURGE\s+intent\s*=\s*(\S+?):\s+(.+?)\s*$)", std::regex::icase);
  Protocol p;
  p.tier = tier;
  p.source_architect = source_architect;
  for (const auto& line : text::split_lines(sop_body(response))) {
    std::smatch m;
    if (std::regex_match(line, m, step_re)) {
      const auto n = std::stoul(m[1].str());
      if (n != p.steps.size() + 1) {
        throw ProtocolError(fmt::format("step numbering broken: expected STEP {}, found STEP {}", p.steps.size() + 1, n));
      }
      p.steps.push_back(m[2].str());
    } else if (std::regex_match(line, m, check_re)) {
      p.checkpoints.push_back(m[1].str());
    } else if (std::regex_match(line, m, purge_re)) {
      p.purge_directives.push_back({m[1].str(), m[2].str()});
    }
  }
  if (p.steps.empty()) throw ProtocolError("no STEP lines found in Architect output");
  p.protocol_id = "sop-" + sha256_hex(body_text(p)).substr(0, 12);
  return p;
}

std::vector<std::string> protocol_violations(const Protocol& p, const forge::IntentPair& pair) {
  std::vector<std::string> out;
  const auto bounds = step_bounds(p.tier);
  const auto n = p.steps.size();
  if (n < bounds.min || (bounds.max && n > *bounds.max)) {
    out.push_back(fmt::format("step count {} outside bounds for tier {} ({}..{})", n, to_string(p.tier), bounds.min,
                              bounds.max ? std::to_string(*bounds.max) : std::string("unbounded")));
  }
  bool purged = false;
  for (const auto& d : p.purge_directives) purged = purged || d.intent_id == pair.g1_id;
  if (!purged) out.push_back("missing purge directive");
  if (p.tier != GranularityTier::hyper_compressed && p.checkpoints.empty()) {
    out.push_back("missing verification checkpoint");
  }
  return out;
}

std::string sop_text(const std::vector<std::string>& steps, const std::vector<std::string>& checkpoints,
                     const std::vector<PurgeDirective>& purges) {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) out += fmt::format("STEP {}: {}\n", i + 1, steps[i]);
  for (const auto& c : checkpoints) out += fmt::format("CHECKPOINT: {}\n", c);
  for (const auto& d : purges) out += fmt::format("PURGE intent={}: {}\n", d.intent_id, d.text);
  return out;
}

std::string render_protocol(const Protocol& p) {
  return fmt::format("STANDARD OPERATING PROCEDURE {} (tier: {})\n{}", p.protocol_id, to_string(p.tier), body_text(p));
}

}  // namespace latchbench::strategy
