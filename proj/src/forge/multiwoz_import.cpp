#include <fmt/core.h>

#include "latchbench/core/error.hpp"
#include "latchbench/core/text.hpp"
#include "latchbench/forge/dialogue.hpp"

namespace latchbench::forge {

namespace {

Speaker multiwoz_speaker(const json& s) {
  if (s.is_number_integer()) return s.get<int>() == 0 ? Speaker::user : Speaker::system;
  if (s.is_string()) return speaker_from_string(s.get<std::string>());
  throw FormatError("unrecognized speaker encoding");
}

DialogueSource convert(const json& j) {
  DialogueSource d;
  if (j.contains("dialogue_id")) {
    d.id = j["dialogue_id"].get<std::string>();
  } else if (j.contains("id")) {
    d.id = j["id"].get<std::string>();
  } else {
    throw FormatError("dialogue without dialogue_id");
  }
  if (j.contains("services") && j["services"].is_array()) {
    for (const auto& s : j["services"]) d.domain_tags.push_back(s.get<std::string>());
  }
  const auto& turns = j.at("turns");
  if (turns.is_array()) {
    for (const auto& t : turns) {
      d.turns.push_back({multiwoz_speaker(t.at("speaker")), t.at("utterance").get<std::string>()});
    }
  } else if (turns.is_object()) {
    const auto& speakers = turns.at("speaker");
    const auto& utterances = turns.at("utterance");
    if (speakers.size() != utterances.size()) throw FormatError(fmt::format("{}: speaker/utterance length mismatch", d.id));
    for (std::size_t i = 0; i < speakers.size(); ++i) {
      d.turns.push_back({multiwoz_speaker(speakers[i]), utterances[i].get<std::string>()});
    }
  } else {
    throw FormatError(fmt::format("{}: unsupported turns layout", d.id));
  }
  std::erase_if(d.turns, [](const DialogueTurn& t) { return text::trim(t.text).empty(); });
  if (d.turns.empty()) throw FormatError(fmt::format("{}: no turns", d.id));
  return d;
}

}  // namespace

std::vector<DialogueSource> import_multiwoz(const std::filesystem::path& path) {
  const auto raw = read_text(path);
  std::vector<json> records;
  const auto first = raw.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && raw[first] == '[') {
    json arr;
    try {
      arr = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
    }
    for (auto& r : arr) records.push_back(std::move(r));
  } else {
    records = read_jsonl(path);
  }
  std::vector<DialogueSource> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      out.push_back(convert(records[i]));
    } catch (const json::exception& e) {
      throw FormatError(fmt::format("{}: record {}: {}", path.string(), i + 1, e.what()));
    } catch (const FormatError& e) {
      throw FormatError(fmt::format("{}: record {}: {}", path.string(), i + 1, e.what()));
    }
  }
  if (out.empty()) throw FormatError(fmt::format("{}: no dialogues", path.string()));
  return out;
}

}  // namespace latchbench::forge
