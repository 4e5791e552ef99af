#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "latchbench/backend/backend.hpp"
#include "latchbench/forge/dialogue.hpp"
#include "latchbench/forge/trajectory.hpp"

namespace latchbench::forge {

enum class UpdateMode { templated, dynamic };

std::string_view to_string(UpdateMode m);
UpdateMode update_mode_from_string(std::string_view s);

inline constexpr std::string_view kUpdateTemplateVersion = "update-templates/v1";

/// A user constraint keyword and the one-sentence update that contradicts it.
struct UpdateTemplate {
  std::string id;
  std::string keyword;
  std::string relation;
  std::string update;
};

const std::vector<UpdateTemplate>& update_templates();

/// Returned when no keyword matches.
const UpdateTemplate& fallback_template();

json update_templates_json();

/// g1 is the dialogue's last user constraint; g2 contradicts it. Templated
/// mode picks the first table entry whose keyword appears in the latest user
/// turn that has any keyword. Dynamic mode asks `backend` for one sentence,
/// re-asks once if the reply is not exactly one sentence, then throws
/// DomainError. Backend failures propagate.
IntentPair generate_update(const DialogueSource& dialogue, UpdateMode mode,
                           backend::CompletionBackend* backend = nullptr,
                           const backend::CompletionParams& params = {});

}  // namespace latchbench::forge
