#include "latchbench/judge/judge.hpp"

#include <fmt/core.h>

#include <cctype>

#include "latchbench/core/text.hpp"
#include "latchbench/strategy/prompts.hpp"

namespace latchbench::judge {

namespace {

std::optional<int> strict_bit(std::string_view reply) {
  const auto t = text::trim(reply);
  if (t == "1") return 1;
  if (t == "0") return 0;
  return std::nullopt;
}

}  // namespace

SemanticResult judge_semantic(std::string_view response, std::string_view update_text,
                              backend::CompletionBackend& judge_backend, const backend::CompletionParams& params) {
  const backend::CallContext ctx{backend::CallRole::judge, 0, nullptr, nullptr, std::nullopt};
  std::vector<backend::ChatMessage> messages{{backend::Role::user, strategy::judge_prompt(response, update_text)}};
  const auto first = judge_backend.complete(messages, params, ctx);
  if (auto bit = strict_bit(first.text)) return {*bit, false};
  messages.push_back({backend::Role::assistant, text::trim(first.text).empty() ? std::string("(empty)") : first.text});
  messages.push_back({backend::Role::user, strategy::judge_retry_prompt(response, update_text)});
  const auto second = judge_backend.complete(messages, params, ctx);
  return {strict_bit(second.text).value_or(0), true};
}

bool verbatim_audit(std::string_view response, std::string_view expected_signal) {
  auto signal = text::fold(expected_signal);
  auto is_punct = [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; };
  while (!signal.empty() && is_punct(signal.front())) signal.erase(signal.begin());
  while (!signal.empty() && is_punct(signal.back())) signal.pop_back();
  signal = text::trim(signal);
  if (signal.empty()) throw DomainError("verbatim_audit: empty expected signal");
  return text::contains_bounded(text::fold(response), signal);
}

const std::vector<std::string>& purge_markers() {
  static const std::vector<std::string> markers = {"purge",  "superseded", "discard",    "no longer",
                                                   "cancel", "instead of", "rather than", "replaced"};
  return markers;
}

bool audit_procedural_integrity(const strategy::AgentRunRecord& record, const forge::IntentPair& pair) {
  if (record.strategy != strategy::Strategy::ssrp) {
    throw DomainError(fmt::format("PI audit requires an ssrp record, got {}", strategy::to_string(record.strategy)));
  }
  if (!record.protocol) throw DomainError(fmt::format("PI audit: record {} has no protocol", record.key()));
  const auto& response = record.final_response;
  std::size_t previous = 0;
  for (std::size_t i = 1; i <= record.protocol->steps.size(); ++i) {
    const auto at = response.find(fmt::format("[S{}]", i));
    if (at == std::string::npos) return false;
    if (i > 1 && at <= previous) return false;
    previous = at;
  }
  const auto g1 = text::fold(pair.g1_text);
  if (g1.empty()) return true;
  // A mention of g1 is a retraction only if its sentence carries a purge
  // marker outside the quoted g1 text. The quote is swapped for a placeholder
  // first so punctuation inside g1 cannot split its sentence.
  const std::string placeholder = "\x01";
  for (const auto& line : text::split_lines(response)) {
    auto folded = text::fold(line);
    if (folded.find(g1) == std::string::npos) continue;
    for (auto at = folded.find(g1); at != std::string::npos; at = folded.find(g1, at + placeholder.size())) {
      folded.replace(at, g1.size(), placeholder);
    }
    for (const auto& sentence : text::split_sentences(folded)) {
      if (sentence.find(placeholder) == std::string::npos) continue;
      bool marked = false;
      for (const auto& m : purge_markers()) marked = marked || sentence.find(m) != std::string::npos;
      if (!marked) return false;
    }
  }
  return true;
}

json to_json(const Verdict& v) {
  return {{"trajectory_id", v.trajectory_id},
          {"strategy", strategy::to_string(v.strategy)},
          {"label", v.label},
          {"judge_bit", v.judge_bit},
          {"verbatim_hit", v.verbatim_hit},
          {"refusal", v.refusal},
          {"pi_adherent", v.pi_adherent ? json(*v.pi_adherent) : json(nullptr)},
          {"final_success", v.final_success},
          {"judge_backend_id", v.judge_backend_id},
          {"parse_failure", v.parse_failure},
          {"backend_error", v.backend_error},
          {"judge_error", v.judge_error ? json(*v.judge_error) : json(nullptr)},
          {"tier", v.tier},
          {"model_pair", v.model_pair},
          {"granularity", v.granularity ? json(*v.granularity) : json(nullptr)},
          {"critical_fraction", v.critical_fraction}};
}

Verdict verdict_from_json(const json& j) {
  Verdict v;
  try {
    v.trajectory_id = j.at("trajectory_id").get<std::string>();
    v.strategy = strategy::strategy_from_string(j.at("strategy").get<std::string>());
    v.label = j.value("label", std::string(strategy::to_string(v.strategy)));
    v.judge_bit = j.at("judge_bit").get<int>();
    v.verbatim_hit = j.at("verbatim_hit").get<bool>();
    v.refusal = j.at("refusal").get<bool>();
    if (j.contains("pi_adherent") && !j["pi_adherent"].is_null()) v.pi_adherent = j["pi_adherent"].get<bool>();
    v.final_success = j.at("final_success").get<bool>();
    v.judge_backend_id = j.value("judge_backend_id", "");
    v.parse_failure = j.value("parse_failure", false);
    v.backend_error = j.value("backend_error", false);
    if (j.contains("judge_error") && !j["judge_error"].is_null()) v.judge_error = j["judge_error"].get<std::string>();
    v.tier = j.value("tier", "");
    v.model_pair = j.value("model_pair", "");
    if (j.contains("granularity") && !j["granularity"].is_null()) v.granularity = j["granularity"].get<std::string>();
    v.critical_fraction = j.value("critical_fraction", 0.0);
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("malformed verdict: {}", e.what()));
  }
  if (v.judge_bit != 0 && v.judge_bit != 1) throw FormatError("verdict judge_bit must be 0 or 1");
  return v;
}

double critical_fraction(const forge::Trajectory& t) {
  std::string id = t.intent_pair.g2_id;
  if (t.fact_chain && !t.fact_chain->facts.empty()) id = t.fact_chain->facts.back().fact_id;
  const auto* seed = t.find_seed(id);
  if (seed == nullptr || t.token_count == 0) return 0.0;
  return static_cast<double>(seed->placed_offset_tokens) / static_cast<double>(t.token_count);
}

Verdict judge_record(const strategy::AgentRunRecord& record, const forge::Trajectory& trajectory,
                     backend::CompletionBackend& judge_backend, const RefusalDetector& refusal,
                     const backend::CompletionParams& params) {
  Verdict v;
  v.trajectory_id = record.trajectory_id;
  v.strategy = record.strategy;
  v.label = record.label;
  v.judge_backend_id = judge_backend.id();
  v.tier = record.tier;
  v.model_pair = record.model_pair;
  v.granularity = record.granularity;
  v.critical_fraction = critical_fraction(trajectory);
  if (record.error) {
    v.backend_error = true;
    if (record.strategy == strategy::Strategy::ssrp) v.pi_adherent = false;
    return v;
  }
  v.verbatim_hit = verbatim_audit(record.final_response, trajectory.expected_signal);
  v.refusal = refusal(record.final_response);
  if (record.strategy == strategy::Strategy::ssrp) {
    v.pi_adherent = audit_procedural_integrity(record, trajectory.intent_pair);
  }
  try {
    const auto sem = judge_semantic(record.final_response, trajectory.intent_pair.g2_text, judge_backend, params);
    v.judge_bit = sem.bit;
    v.parse_failure = sem.parse_failure;
  } catch (const backend::BackendError& e) {
    v.judge_error = e.what();
  }
  v.final_success = combine(v.judge_bit, v.verbatim_hit, v.refusal);
  return v;
}

}  // namespace latchbench::judge
