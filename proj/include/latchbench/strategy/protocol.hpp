#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latchbench/core/error.hpp"
#include "latchbench/core/jsonl.hpp"
#include "latchbench/forge/trajectory.hpp"

namespace latchbench::strategy {

enum class GranularityTier : int { hyper_compressed, optimal, verbose };

std::string_view to_string(GranularityTier t);
GranularityTier granularity_from_string(std::string_view s);

struct StepBounds {
  std::size_t min = 1;
  std::optional<std::size_t> max;  // nullopt means unbounded
};

/// (1,1), (3,3) and (10, unbounded).
StepBounds step_bounds(GranularityTier t);

struct PurgeDirective {
  std::string intent_id;
  std::string text;

  friend bool operator==(const PurgeDirective&, const PurgeDirective&) = default;
};

struct Protocol {
  std::string protocol_id;
  std::vector<std::string> steps;
  std::vector<std::string> checkpoints;
  std::vector<PurgeDirective> purge_directives;
  GranularityTier tier = GranularityTier::optimal;
  std::string source_architect;

  friend bool operator==(const Protocol&, const Protocol&) = default;
};

/// The Architect's output could not be turned into a valid Protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

json to_json(const Protocol& p);
Protocol protocol_from_json(const json& j);

/// Parses the line-oriented SOP format. If the text holds a ```sop fenced
/// block only that block is read; otherwise every line is considered.
///   STEP <n>: <text>
///   CHECKPOINT: <text>
///   PURGE intent=<id>: <text>
/// Step numbers must run 1..n in order. Throws ProtocolError when no step is
/// found or the numbering is broken.
Protocol parse_protocol(std::string_view response, GranularityTier tier, const std::string& source_architect);

/// Contract violations against the tier and the trajectory's intent pair:
/// step-count bounds, "missing purge directive" for g1, and missing
/// checkpoints for optimal and verbose tiers. Empty means valid.
std::vector<std::string> protocol_violations(const Protocol& p, const forge::IntentPair& pair);

/// Canonical text form. This exact text is embedded in the Executive prompt.
std::string render_protocol(const Protocol& p);

/// Builds an SOP in the wire format (used by the synthetic Architect).
std::string sop_text(const std::vector<std::string>& steps, const std::vector<std::string>& checkpoints,
                     const std::vector<PurgeDirective>& purges);

}  // namespace latchbench::strategy
