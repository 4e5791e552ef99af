#include "latchbench/strategy/engine.hpp"

#include <fmt/core.h>

#include <chrono>

#include "latchbench/core/text.hpp"
#include "latchbench/strategy/prompts.hpp"

namespace latchbench::strategy {

using backend::ChatMessage;
using backend::Role;

std::vector<ChatMessage> render_history(const forge::Trajectory& t, std::string_view system_prompt,
                                        std::optional<std::size_t> window) {
  std::vector<ChatMessage> out{{Role::system, std::string(system_prompt)}};
  std::size_t first = 0;
  if (window && *window < t.assembled_turns.size()) first = t.assembled_turns.size() - *window;
  for (std::size_t i = first; i < t.assembled_turns.size(); ++i) {
    const auto& turn = t.assembled_turns[i];
    const bool customer = turn.kind != forge::BlockKind::noise && turn.speaker == forge::Speaker::user;
    out.push_back({customer ? Role::user : Role::assistant, turn.text});
  }
  return out;
}

namespace {

std::string call(backend::CompletionBackend& b, std::vector<ChatMessage> messages, const StrategyOptions& options,
                 const backend::CallContext& ctx, const std::string& stage, CallTrace* trace) {
  backend::validate_messages(messages);
  if (trace) trace->prompts.push_back(messages);
  try {
    auto completion = b.complete(messages, options.params, ctx);
    if (trace) trace->responses.push_back(completion.text);
    return completion.text;
  } catch (const backend::BackendError& e) {
    throw StageError(stage, std::string(backend::to_string(e.kind())), e.what());
  }
}

AgentRunRecord base_record(const forge::Trajectory& t, Strategy s, std::uint64_t seed, const StrategyOptions& options) {
  AgentRunRecord r;
  r.trajectory_id = t.id;
  r.strategy = s;
  r.label = options.label.empty() ? std::string(to_string(s)) : options.label;
  r.prompt_version = std::string(kPromptVersion);
  r.seed = seed;
  r.tier = std::string(forge::to_string(t.tier));
  r.model_pair = options.model_pair;
  return r;
}

void finish(AgentRunRecord& r, CallTrace& trace, std::chrono::steady_clock::time_point start) {
  r.prompts = std::move(trace.prompts);
  r.responses = std::move(trace.responses);
  r.repair_calls = trace.repair_calls;
  if (!r.error) {
    for (auto it = r.responses.rbegin(); it != r.responses.rend(); ++it) {
      if (!text::trim(*it).empty()) {
        r.final_response = *it;
        break;
      }
    }
  }
  r.wall_time_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

AgentRunRecord run_vanilla(const forge::Trajectory& t, backend::CompletionBackend& backend, std::uint64_t seed,
                           const StrategyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  auto r = base_record(t, Strategy::vanilla, seed, options);
  r.primary_backend = backend.id();
  CallTrace trace;
  auto messages = render_history(t, kAgentSystemPrompt);
  messages.push_back({Role::user, vanilla_instruction(t)});
  r.call_count = 1;
  try {
    call(backend, std::move(messages), options, {backend::CallRole::vanilla, seed, &t, nullptr, std::nullopt}, "vanilla",
         &trace);
  } catch (const StageError& e) {
    r.error = RunError{e.stage(), e.kind(), e.what()};
  }
  finish(r, trace, start);
  return r;
}

Protocol synthesize_protocol(backend::CompletionBackend& architect, const forge::Trajectory& t, GranularityTier tier,
                             std::uint64_t seed, const StrategyOptions& options, CallTrace* trace) {
  const backend::CallContext ctx{backend::CallRole::architect, seed, &t, nullptr, tier};
  auto messages = render_history(t, kAgentSystemPrompt);
  messages.push_back({Role::user, architect_instruction(t, tier)});

  auto attempt = [&](const std::string& response) -> std::pair<std::optional<Protocol>, std::string> {
    try {
      auto p = parse_protocol(response, tier, architect.id());
      const auto violations = protocol_violations(p, t.intent_pair);
      if (violations.empty()) return {std::move(p), {}};
      std::string joined;
      for (const auto& v : violations) joined += (joined.empty() ? "" : "; ") + v;
      return {std::nullopt, joined};
    } catch (const ProtocolError& e) {
      return {std::nullopt, e.what()};
    }
  };

  const auto first_text = call(architect, messages, options, ctx, "architect", trace);
  auto first = attempt(first_text);
  if (first.first) return *first.first;

  messages.push_back({Role::assistant, text::trim(first_text).empty() ? std::string("(empty reply)") : first_text});
  messages.push_back({Role::user, architect_repair_instruction(t, tier, first.second)});
  if (trace) ++trace->repair_calls;
  auto second = attempt(call(architect, messages, options, ctx, "architect", trace));
  if (second.first) return *second.first;
  throw ProtocolError(second.second);
}

std::string execute_protocol(backend::CompletionBackend& executive, const Protocol& protocol,
                             const forge::Trajectory& t, std::uint64_t seed, const StrategyOptions& options,
                             CallTrace* trace) {
  auto messages = render_history(t, executive_system_message(protocol), options.executive_history_window);
  messages.push_back({Role::user, executive_instruction(t, protocol)});
  const backend::CallContext ctx{backend::CallRole::executive, seed, &t, &protocol, protocol.tier};
  return call(executive, std::move(messages), options, ctx, "executive", trace);
}

AgentRunRecord run_ssrp(const forge::Trajectory& t, backend::CompletionBackend& architect,
                        backend::CompletionBackend& executive, GranularityTier tier, std::uint64_t seed,
                        const StrategyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  auto r = base_record(t, Strategy::ssrp, seed, options);
  r.primary_backend = architect.id();
  r.secondary_backend = executive.id();
  r.granularity = std::string(to_string(tier));
  CallTrace trace;
  try {
    r.call_count = 1;
    auto protocol = synthesize_protocol(architect, t, tier, seed, options, &trace);
    r.protocol = protocol;
    r.call_count = 2;
    execute_protocol(executive, protocol, t, seed, options, &trace);
  } catch (const StageError& e) {
    r.error = RunError{e.stage(), e.kind(), e.what()};
  } catch (const ProtocolError& e) {
    r.error = RunError{"architect", "protocol", e.what()};
  }
  finish(r, trace, start);
  return r;
}

AgentRunRecord run_reflexion(const forge::Trajectory& t, backend::CompletionBackend& backend, std::uint64_t seed,
                             const StrategyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  auto r = base_record(t, Strategy::reflexion, seed, options);
  r.primary_backend = backend.id();
  CallTrace trace;
  auto messages = render_history(t, kAgentSystemPrompt);
  messages.push_back({Role::user, vanilla_instruction(t)});
  try {
    r.call_count = 1;
    const auto draft =
        call(backend, messages, options, {backend::CallRole::reflexion_draft, seed, &t, nullptr, std::nullopt}, "draft",
             &trace);
    messages.push_back({Role::assistant, text::trim(draft).empty() ? std::string("(no answer)") : draft});
    messages.push_back({Role::user, reflexion_critique_instruction(t)});
    r.call_count = 2;
    call(backend, std::move(messages), options,
         {backend::CallRole::reflexion_critique, seed, &t, nullptr, std::nullopt}, "critique", &trace);
  } catch (const StageError& e) {
    r.error = RunError{e.stage(), e.kind(), e.what()};
  }
  finish(r, trace, start);
  return r;
}

}  // namespace latchbench::strategy
