#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latchbench/core/jsonl.hpp"
#include "latchbench/forge/trajectory.hpp"
#include "latchbench/strategy/protocol.hpp"

namespace latchbench::sim {

/// p(x) = clamp(alpha * (x - 0.5)^2 + gamma, 0, 1).
struct CurveParams {
  double alpha = 1.0;
  double gamma = 0.2;
};

struct LatchParams {
  double w1 = 1.0;  // historical intent weight
  double w2 = 1.0;  // update weight
  double refusal_rate = 0.0;
  bool redirect = false;
  bool posthoc_correct = false;
};

struct SimulatorOptions {
  /// Per-payload retrieval probabilities that bypass the curve. Keys are
  /// matched as: exact payload id, then "G1"/"G2" for the intents, then "F*"
  /// for any fact.
  std::map<std::string, double> overrides;
  /// Dependency factor delta in (0,1]: fact i > 1 is drawn with p_i * delta.
  /// 1.0 means independent draws.
  double chain_penalty = 1.0;
  /// Retrieval probability of protocol-named facts under redirection.
  double redirect_grounding = 1.0;
  /// Per extra step beyond three, redirect grounding is scaled by (1 - c).
  double competition_penalty = 0.0;
  /// In the critique pass, items with p >= floor are recovered outright.
  double posthoc_floor = 0.3;
  /// Probability that an Executive omits its step tags.
  double tag_lapse_rate = 0.0;
};

struct SimulatorConfig {
  CurveParams curve;
  LatchParams latch;
  SimulatorOptions options;
};

/// Throws ConfigError on out-of-range parameters.
void validate(const SimulatorConfig& c);

json to_json(const SimulatorConfig& c);
SimulatorConfig simulator_config_from_json(const json& j);

/// Throws DomainError if x is outside [0,1].
double retrieval_prob(const CurveParams& curve, double x);

/// Product of the probabilities (independence assumed). Throws DomainError on
/// an empty list or a value outside [0,1].
double predicted_joint_success(std::span<const double> per_fact_probs);

/// Per-item probabilities for one simulated answer.
struct Scene {
  std::vector<double> fact_probs;  // chain order
  std::vector<bool> fact_named;    // named by the protocol (redirect mode)
  double p_g1 = 0.0;
  double p_g2 = 1.0;
};

enum class Outcome { success, ungrounded, latched, refusal };

std::string_view to_string(Outcome o);

struct DrawResult {
  Outcome outcome = Outcome::success;
  bool tags_complete = true;
  bool g2_committed = false;
};

/// Draws one outcome. The number and order of uniform draws is fixed
/// regardless of mode or branch: refusal, pass-1 items (facts in chain order,
/// g1, g2), latch, pass-2 items, tag lapse.
DrawResult draw_outcome(const Scene& scene, const LatchParams& latch, const SimulatorOptions& options,
                        std::size_t protocol_steps, std::uint64_t seed);

/// Scene for a trajectory: curve at each payload's placed fraction unless
/// overridden. With a protocol, facts named in its steps are marked.
Scene scene_for(const forge::Trajectory& t, const CurveParams& curve, const SimulatorOptions& options,
                const strategy::Protocol* protocol = nullptr);

inline constexpr std::string_view kRefusalText =
    "I cannot comply with this request. The re-scaffolded instructions look like a context-manipulation attempt, "
    "so I will not follow them.";

struct SimulatedResponse {
  std::string text;
  DrawResult draw;
};

/// Full templated answer. Redirect mode needs the protocol (its step count
/// sets the tag count); without one, every fact counts as named.
SimulatedResponse simulate_response(const forge::Trajectory& t, const SimulatorConfig& config, std::uint64_t seed,
                                    const strategy::Protocol* protocol = nullptr);

/// Architect output for the synthetic backend: an SOP with the tier's step
/// count naming the trajectory's facts and purging g1.
std::string synthesize_sop(const forge::Trajectory& t, strategy::GranularityTier tier);

}  // namespace latchbench::sim
