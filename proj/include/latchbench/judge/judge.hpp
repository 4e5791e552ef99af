#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "latchbench/backend/backend.hpp"
#include "latchbench/forge/trajectory.hpp"
#include "latchbench/judge/refusal.hpp"
#include "latchbench/strategy/run_record.hpp"

namespace latchbench::judge {

struct SemanticResult {
  int bit = 0;
  bool parse_failure = false;  // first reply was not a bare '1' or '0'
};

/// Sends the judge prompt; strict '1'/'0' parse after trimming; one re-ask on
/// a malformed reply, then 0. BackendError propagates.
SemanticResult judge_semantic(std::string_view response, std::string_view update_text,
                              backend::CompletionBackend& judge_backend, const backend::CompletionParams& params = {});

/// Normalization: case-fold, collapse whitespace, strip punctuation at both
/// ends of the signal; the signal must then occur in the folded response with
/// no letter or digit directly before or after it. Throws DomainError on an
/// empty signal.
bool verbatim_audit(std::string_view response, std::string_view expected_signal);

/// Words that mark a mention of g1 as a retraction rather than a commitment.
const std::vector<std::string>& purge_markers();

/// Structural adherence: (a) tags [S1]..[Sn] for the protocol's n steps all
/// present with first occurrences in increasing order, and (b) no sentence
/// or line mentions g1's text unless it also carries a purge marker. Throws
/// DomainError for a non-SSRP record or one without a protocol.
bool audit_procedural_integrity(const strategy::AgentRunRecord& record, const forge::IntentPair& pair);

struct Verdict {
  std::string trajectory_id;
  strategy::Strategy strategy = strategy::Strategy::vanilla;
  std::string label;
  int judge_bit = 0;
  bool verbatim_hit = false;
  bool refusal = false;
  std::optional<bool> pi_adherent;  // ssrp only
  bool final_success = false;
  std::string judge_backend_id;
  bool parse_failure = false;
  bool backend_error = false;              // the run itself failed
  std::optional<std::string> judge_error;  // the judge failed; excluded from APA
  std::string tier;
  std::string model_pair;
  std::optional<std::string> granularity;
  double critical_fraction = 0.0;  // placement of the answer-bearing payload

  std::string key() const { return trajectory_id + "|" + label; }

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

inline bool combine(int judge_bit, bool verbatim_hit, bool refusal) {
  return judge_bit == 1 && verbatim_hit && !refusal;
}

json to_json(const Verdict& v);
Verdict verdict_from_json(const json& j);

/// Placement fraction used for curve points: the last fact of the chain if
/// any, otherwise the update.
double critical_fraction(const forge::Trajectory& t);

/// Full verdict for one run. Failed runs become failed verdicts without a
/// judge call; judge outages are recorded in judge_error.
Verdict judge_record(const strategy::AgentRunRecord& record, const forge::Trajectory& trajectory,
                     backend::CompletionBackend& judge_backend, const RefusalDetector& refusal = RefusalDetector(),
                     const backend::CompletionParams& params = {});

}  // namespace latchbench::judge
