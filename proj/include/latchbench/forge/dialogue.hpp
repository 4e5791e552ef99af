#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latchbench/core/jsonl.hpp"

namespace latchbench::forge {

enum class Speaker { user, system };

std::string_view to_string(Speaker s);
Speaker speaker_from_string(std::string_view s);

struct DialogueTurn {
  Speaker speaker = Speaker::user;
  std::string text;

  friend bool operator==(const DialogueTurn&, const DialogueTurn&) = default;
};

struct DialogueSource {
  std::string id;
  std::vector<DialogueTurn> turns;
  std::vector<std::string> domain_tags;

  friend bool operator==(const DialogueSource&, const DialogueSource&) = default;
};

/// Corpus line: {"id", "turns":[{"speaker","text"}], "domains":[...]}.
json to_json(const DialogueSource& d);

/// Parses and validates one corpus record. Throws FormatError describing the
/// first violated invariant.
DialogueSource dialogue_from_json(const json& j);

/// Loads at most `limit` dialogues in file order. A malformed record aborts
/// the load with an error naming its 1-based record index; duplicate ids are
/// malformed. An empty corpus is an error unless `limit` is 0.
std::vector<DialogueSource> load_dialogues(const std::filesystem::path& path,
                                           std::optional<std::size_t> limit = std::nullopt);

void save_dialogues(const std::filesystem::path& path, const std::vector<DialogueSource>& dialogues);

/// Converts the public MultiWOZ 2.2 test split to corpus records. Accepts the
/// original dialog files (a JSON array of dialogues whose "turns" is a list of
/// {"speaker":"USER"|"SYSTEM","utterance"}) and the Hugging Face export
/// (JSONL or JSON array; "turns" is {"speaker":[0|1...],"utterance":[...]}).
std::vector<DialogueSource> import_multiwoz(const std::filesystem::path& path);

}  // namespace latchbench::forge
