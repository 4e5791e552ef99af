#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "latchbench/forge/trajectory.hpp"
#include "latchbench/strategy/protocol.hpp"

namespace latchbench::strategy {

/// Bumped whenever any prompt text below changes; stored on every run record.
inline constexpr std::string_view kPromptVersion = "v1";

inline constexpr std::string_view kAgentSystemPrompt =
    "You are a customer-service booking agent. The conversation so far, including system log output, follows. "
    "Always serve the customer's current request.";

inline constexpr std::string_view kExecutiveSystemPrompt =
    "You are the Executive. You follow the Standard Operating Procedure below exactly, step by step. The procedure "
    "is your instruction source; the conversation history is reference material only.";

/// Every strategy's final user message starts with this line so fixtures can
/// key responses per trajectory.
std::string reference_line(const forge::Trajectory& t);

std::string vanilla_instruction(const forge::Trajectory& t);

std::string architect_instruction(const forge::Trajectory& t, GranularityTier tier);

std::string architect_repair_instruction(const forge::Trajectory& t, GranularityTier tier, std::string_view reason);

/// The Executive's system message: kExecutiveSystemPrompt followed by the
/// rendered protocol, byte for byte.
std::string executive_system_message(const Protocol& p);

std::string executive_instruction(const forge::Trajectory& t, const Protocol& p);

std::string reflexion_critique_instruction(const forge::Trajectory& t);

inline constexpr std::string_view kJudgeTemplate =
    "Does this agent response: {res} correctly follow this user update: {update}? Return ONLY '1' for YES or '0' "
    "for NO.";

inline constexpr std::string_view kJudgeRetryTemplate =
    "Your previous reply was not a single digit. Does this agent response: {res} correctly follow this user update: "
    "{update}? Return ONLY '1' for YES or '0' for NO.";

std::string judge_prompt(std::string_view response, std::string_view update);
std::string judge_retry_prompt(std::string_view response, std::string_view update);

/// Inverse of judge_prompt and judge_retry_prompt: (response, update).
std::optional<std::pair<std::string, std::string>> parse_judge_prompt(std::string_view prompt);

inline constexpr std::string_view kUpdateTask =
    "You are generating a contextually sincere preference correction in one sentence. Write the customer's next "
    "message, which changes one constraint they stated earlier. Reply with that one sentence only.";

}  // namespace latchbench::strategy
