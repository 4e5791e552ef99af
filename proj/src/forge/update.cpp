#include "latchbench/forge/update.hpp"

#include <fmt/core.h>

#include "latchbench/core/text.hpp"
#include "latchbench/strategy/prompts.hpp"

namespace latchbench::forge {

std::string_view to_string(UpdateMode m) { return m == UpdateMode::templated ? "templated" : "dynamic"; }

UpdateMode update_mode_from_string(std::string_view s) {
  if (s == "templated") return UpdateMode::templated;
  if (s == "dynamic") return UpdateMode::dynamic;
  throw ConfigError(fmt::format("unknown update mode '{}'", s));
}

const std::vector<UpdateTemplate>& update_templates() {
  static const std::vector<UpdateTemplate> table = {
      {"T01", "cheap", "contradicts",
       "Actually, I have changed my mind about the price and want something in the expensive range instead of a cheap "
       "place."},
      {"T02", "expensive", "contradicts",
       "Actually, money is tighter than I thought, so please switch to a cheap option instead of an expensive one."},
      {"T03", "moderate", "contradicts",
       "On second thought, please make that a cheap option rather than a moderately priced one."},
      {"T04", "north", "contradicts", "Actually, I need it to be in the south of town instead of the north."},
      {"T05", "south", "contradicts", "Actually, I need it to be in the north of town instead of the south."},
      {"T06", "east", "contradicts", "Actually, I would rather be on the west side than the east side."},
      {"T07", "west", "contradicts", "Actually, I would rather be on the east side than the west side."},
      {"T08", "centre", "contradicts", "Actually, please look outside the city centre instead of in it."},
      {"T09", "parking", "supersedes",
       "Actually, parking no longer matters to me, but I now need free wifi instead."},
      {"T10", "wifi", "supersedes", "Actually, wifi no longer matters to me, but I now need free parking instead."},
      {"T11", "star", "contradicts", "Actually, please change the star rating to a modest 2 star place instead."},
      {"T12", "train", "supersedes", "Actually, I have decided to take a taxi instead of the train."},
      {"T13", "food", "contradicts", "Actually, I would like Italian food instead of what I asked for earlier."},
  };
  return table;
}

const UpdateTemplate& fallback_template() {
  static const UpdateTemplate fallback{
      "T99", "", "supersedes",
      "Actually, I have changed my mind, so please replace my earlier request with a different option than the one I "
      "first asked for."};
  return fallback;
}

json update_templates_json() {
  json rows = json::array();
  for (const auto& t : update_templates()) {
    rows.push_back({{"id", t.id}, {"keyword", t.keyword}, {"relation", t.relation}, {"update", t.update}});
  }
  const auto& f = fallback_template();
  rows.push_back({{"id", f.id}, {"keyword", f.keyword}, {"relation", f.relation}, {"update", f.update}});
  return {{"version", kUpdateTemplateVersion}, {"templates", rows}};
}

namespace {

std::string last_user_text(const DialogueSource& d) {
  for (auto it = d.turns.rbegin(); it != d.turns.rend(); ++it) {
    if (it->speaker == Speaker::user) return text::trim(it->text);
  }
  throw DomainError(fmt::format("dialogue {} has no user turn", d.id));
}

IntentPair base_pair(const DialogueSource& d) {
  IntentPair p;
  p.g1_id = d.id + ":G1";
  p.g2_id = d.id + ":G2";
  return p;
}

}  // namespace

IntentPair generate_update(const DialogueSource& dialogue, UpdateMode mode, backend::CompletionBackend* backend,
                           const backend::CompletionParams& params) {
  auto pair = base_pair(dialogue);
  if (mode == UpdateMode::templated) {
    for (auto it = dialogue.turns.rbegin(); it != dialogue.turns.rend(); ++it) {
      if (it->speaker != Speaker::user) continue;
      const auto folded = text::fold(it->text);
      for (const auto& t : update_templates()) {
        if (text::contains_bounded(folded, t.keyword)) {
          pair.g1_text = text::trim(it->text);
          pair.g2_text = t.update;
          pair.relation = t.relation;
          pair.template_id = t.id;
          return pair;
        }
      }
    }
    const auto& f = fallback_template();
    pair.g1_text = last_user_text(dialogue);
    pair.g2_text = f.update;
    pair.relation = f.relation;
    pair.template_id = f.id;
    return pair;
  }

  if (backend == nullptr) throw ConfigError("dynamic update generation needs a backend");
  pair.g1_text = last_user_text(dialogue);
  std::vector<backend::ChatMessage> messages{{backend::Role::system, std::string(strategy::kUpdateTask)}};
  for (const auto& turn : dialogue.turns) {
    messages.push_back({turn.speaker == Speaker::user ? backend::Role::user : backend::Role::assistant, turn.text});
  }
  messages.push_back({backend::Role::user, fmt::format("Reference: {}\nWrite the one-sentence preference correction now.",
                                                       dialogue.id)});
  const backend::CallContext ctx{backend::CallRole::update, 0, nullptr, nullptr, std::nullopt};
  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto reply = text::trim(backend->complete(messages, params, ctx).text);
    if (!reply.empty() && text::count_sentences(reply) == 1 && reply != pair.g1_text) {
      pair.g2_text = reply;
      return pair;
    }
    messages.push_back({backend::Role::assistant, reply.empty() ? std::string("(empty)") : reply});
    messages.push_back({backend::Role::user, fmt::format("Reference: {}\nThat was not exactly one sentence. Reply with "
                                                         "one sentence only.",
                                                         dialogue.id)});
  }
  throw DomainError(fmt::format("dialogue {}: update backend did not return exactly one sentence", dialogue.id));
}

}  // namespace latchbench::forge
