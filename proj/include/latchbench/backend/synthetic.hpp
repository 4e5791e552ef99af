#pragma once

#include "latchbench/backend/backend.hpp"
#include "latchbench/sim/latch.hpp"

namespace latchbench::backend {

/// Latch-simulator backend. Needs the trajectory in the call context; the
/// call role picks the mode: vanilla and reflexion drafts are single-pass,
/// the reflexion critique is post-hoc corrected, the Executive is redirected
/// by the protocol, and the Architect returns a synthesized SOP.
class SyntheticBackend final : public CompletionBackend {
 public:
  SyntheticBackend(std::string id, sim::SimulatorConfig config);

  const sim::SimulatorConfig& config() const { return config_; }

 protected:
  Completion do_complete(std::span<const ChatMessage> messages, const CompletionParams& params,
                         const CallContext& context) override;

 private:
  sim::SimulatorConfig config_;
};

}  // namespace latchbench::backend
