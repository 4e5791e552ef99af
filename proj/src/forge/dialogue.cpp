#include "latchbench/forge/dialogue.hpp"

#include <fmt/core.h>

#include <unordered_set>

#include "latchbench/core/error.hpp"
#include "latchbench/core/text.hpp"

namespace latchbench::forge {

std::string_view to_string(Speaker s) { return s == Speaker::user ? "user" : "system"; }

Speaker speaker_from_string(std::string_view s) {
  const auto lower = text::to_lower(s);
  if (lower == "user") return Speaker::user;
  if (lower == "system") return Speaker::system;
  throw FormatError(fmt::format("unknown speaker '{}'", s));
}

json to_json(const DialogueSource& d) {
  json turns = json::array();
  for (const auto& t : d.turns) {
    turns.push_back({{"speaker", to_string(t.speaker)}, {"text", t.text}});
  }
  return {{"id", d.id}, {"turns", std::move(turns)}, {"domains", d.domain_tags}};
}

DialogueSource dialogue_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("record is not an object");
  DialogueSource d;
  if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty()) {
    throw FormatError("missing or empty \"id\"");
  }
  d.id = j["id"].get<std::string>();
  if (!j.contains("turns") || !j["turns"].is_array() || j["turns"].empty()) {
    throw FormatError(fmt::format("dialogue {}: \"turns\" must be a non-empty array", d.id));
  }
  for (const auto& t : j["turns"]) {
    if (!t.is_object() || !t.contains("speaker") || !t["speaker"].is_string() || !t.contains("text") ||
        !t["text"].is_string()) {
      throw FormatError(fmt::format("dialogue {}: turn needs string \"speaker\" and \"text\"", d.id));
    }
    DialogueTurn turn{speaker_from_string(t["speaker"].get<std::string>()), t["text"].get<std::string>()};
    if (text::trim(turn.text).empty()) throw FormatError(fmt::format("dialogue {}: empty turn text", d.id));
    d.turns.push_back(std::move(turn));
  }
  if (j.contains("domains")) {
    if (!j["domains"].is_array()) throw FormatError(fmt::format("dialogue {}: \"domains\" must be an array", d.id));
    for (const auto& tag : j["domains"]) {
      if (!tag.is_string()) throw FormatError(fmt::format("dialogue {}: domain tags must be strings", d.id));
      d.domain_tags.push_back(tag.get<std::string>());
    }
  }
  return d;
}

std::vector<DialogueSource> load_dialogues(const std::filesystem::path& path, std::optional<std::size_t> limit) {
  std::vector<DialogueSource> out;
  if (limit && *limit == 0) return out;
  std::unordered_set<std::string> seen;
  std::ifstream probe(path);
  if (!probe) throw FormatError(fmt::format("cannot read corpus {}", path.string()));
  std::size_t records = 0;
  try {
    read_jsonl(path, [&](const json& j, std::size_t index) {
      ++records;
      if (limit && out.size() >= *limit) return;
      DialogueSource d;
      try {
        d = dialogue_from_json(j);
      } catch (const FormatError& e) {
        throw FormatError(fmt::format("{}: record {}: {}", path.string(), index, e.what()));
      }
      if (!seen.insert(d.id).second) {
        throw FormatError(fmt::format("{}: record {}: duplicate id {}", path.string(), index, d.id));
      }
      out.push_back(std::move(d));
    });
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
  }
  if (out.empty()) throw FormatError(fmt::format("{}: no valid dialogues", path.string()));
  return out;
}

void save_dialogues(const std::filesystem::path& path, const std::vector<DialogueSource>& dialogues) {
  std::vector<std::string> lines;
  lines.reserve(dialogues.size());
  for (const auto& d : dialogues) lines.push_back(canonical_dump(to_json(d)));
  write_lines_atomic(path, lines);
}

}  // namespace latchbench::forge
