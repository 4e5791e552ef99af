#include "latchbench/strategy/prompts.hpp"

#include <fmt/core.h>

namespace latchbench::strategy {

namespace {

std::string fill_judge(std::string_view tmpl, std::string_view response, std::string_view update) {
  std::string out(tmpl);
  const auto res_at = out.find("{res}");
  out.replace(res_at, 5, response);
  const auto upd_at = out.find("{update}", res_at + response.size());
  out.replace(upd_at, 8, update);
  return out;
}

std::optional<std::pair<std::string, std::string>> unfill_judge(std::string_view tmpl, std::string_view prompt) {
  const auto res_at = tmpl.find("{res}");
  const auto upd_at = tmpl.find("{update}");
  const auto head = tmpl.substr(0, res_at);
  const auto middle = tmpl.substr(res_at + 5, upd_at - res_at - 5);
  const auto tail = tmpl.substr(upd_at + 8);
  if (prompt.size() < head.size() + middle.size() + tail.size()) return std::nullopt;
  if (prompt.substr(0, head.size()) != head || prompt.substr(prompt.size() - tail.size()) != tail) return std::nullopt;
  const auto inner = prompt.substr(head.size(), prompt.size() - head.size() - tail.size());
  // The update comes from the trajectory and rarely contains the separator;
  // split at the last occurrence so responses may contain it.
  const auto split = inner.rfind(middle);
  if (split == std::string_view::npos) return std::nullopt;
  return std::make_pair(std::string(inner.substr(0, split)), std::string(inner.substr(split + middle.size())));
}

}  // namespace

std::string reference_line(const forge::Trajectory& t) { return fmt::format("Reference: {}\n", t.id); }

std::string vanilla_instruction(const forge::Trajectory& t) {
  return reference_line(t) +
         "Task: Using the whole conversation above, give the final booking decision. Name the exact venue or option "
         "that satisfies the customer's current request.";
}

std::string architect_instruction(const forge::Trajectory& t, GranularityTier tier) {
  const auto bounds = step_bounds(tier);
  const auto count = bounds.max ? fmt::format("exactly {}", *bounds.max) : fmt::format("at least {}", bounds.min);
  return reference_line(t) +
         fmt::format(
             "You are the Architect. The customer has updated their goal ({}), superseding the earlier request ({}). "
             "Re-synthesize a Standard Operating Procedure for the Executive. Output one fenced block that starts "
             "with ```sop and contains: {} numbered lines of the form 'STEP n: <action>', one or more lines "
             "'CHECKPOINT: <verification>', and a line 'PURGE intent={}: <directive>' that explicitly discards the "
             "superseded intent. Granularity tier: {}.",
             t.intent_pair.g2_id, t.intent_pair.g1_id, count, t.intent_pair.g1_id, to_string(tier));
}

std::string architect_repair_instruction(const forge::Trajectory& t, GranularityTier tier, std::string_view reason) {
  return reference_line(t) + fmt::format("Your previous SOP was rejected: {}. ", reason) +
         architect_instruction(t, tier).substr(reference_line(t).size());
}

std::string executive_system_message(const Protocol& p) {
  return std::string(kExecutiveSystemPrompt) + "\n\n" + render_protocol(p);
}

std::string executive_instruction(const forge::Trajectory& t, const Protocol& p) {
  return reference_line(t) +
         fmt::format("Execute {} now. Work through its {} step(s) in order and begin the output of step n with the tag "
                     "[Sn]. Then give the final answer naming the exact venue or option.",
                     p.protocol_id, p.steps.size());
}

std::string reflexion_critique_instruction(const forge::Trajectory& t) {
  return reference_line(t) +
         "Critique your previous answer against the entire conversation, paying attention to the customer's most "
         "recent update and to every log fact it depends on. Then give a corrected final answer naming the exact "
         "venue or option.";
}

std::string judge_prompt(std::string_view response, std::string_view update) {
  return fill_judge(kJudgeTemplate, response, update);
}

std::string judge_retry_prompt(std::string_view response, std::string_view update) {
  return fill_judge(kJudgeRetryTemplate, response, update);
}

std::optional<std::pair<std::string, std::string>> parse_judge_prompt(std::string_view prompt) {
  if (auto r = unfill_judge(kJudgeRetryTemplate, prompt)) return r;
  return unfill_judge(kJudgeTemplate, prompt);
}

}  // namespace latchbench::strategy
