#include "latchbench/backend/synthetic.hpp"

#include <fmt/core.h>

#include "latchbench/forge/tokens.hpp"

namespace latchbench::backend {

SyntheticBackend::SyntheticBackend(std::string id, sim::SimulatorConfig config)
    : CompletionBackend(std::move(id), BackendKind::synthetic), config_(std::move(config)) {
  sim::validate(config_);
}

Completion SyntheticBackend::do_complete(std::span<const ChatMessage> messages, const CompletionParams&,
                                         const CallContext& context) {
  if (context.trajectory == nullptr) {
    throw BackendError(BackendError::Kind::unsupported,
                       fmt::format("synthetic backend {} needs a trajectory for role {}", id(), to_string(context.role)));
  }
  const auto& t = *context.trajectory;
  Completion out;
  auto cfg = config_;
  switch (context.role) {
    case CallRole::architect:
      out.text = sim::synthesize_sop(t, context.tier.value_or(strategy::GranularityTier::optimal));
      break;
    case CallRole::executive:
      cfg.latch.redirect = true;
      cfg.latch.posthoc_correct = false;
      out.text = sim::simulate_response(t, cfg, context.seed, context.protocol).text;
      break;
    case CallRole::reflexion_critique:
      cfg.latch.redirect = false;
      cfg.latch.posthoc_correct = true;
      out.text = sim::simulate_response(t, cfg, context.seed).text;
      break;
    case CallRole::vanilla:
    case CallRole::reflexion_draft:
      cfg.latch.redirect = false;
      cfg.latch.posthoc_correct = false;
      out.text = sim::simulate_response(t, cfg, context.seed).text;
      break;
    case CallRole::judge:
    case CallRole::update:
      throw BackendError(BackendError::Kind::unsupported,
                         fmt::format("synthetic backend {} does not serve role {}", id(), to_string(context.role)));
  }
  for (const auto& m : messages) out.usage.prompt_tokens += forge::estimate_tokens(m.content);
  out.usage.completion_tokens = forge::estimate_tokens(out.text);
  return out;
}

}  // namespace latchbench::backend
