#pragma once

#include <filesystem>
#include <functional>
#include <mutex>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace latchbench {

using json = nlohmann::json;

/// Canonical single-line form: keys sorted (nlohmann::json objects are
/// ordered maps), no whitespace. Hashes are always taken over this form.
std::string canonical_dump(const json& value);

/// Reads every non-empty line of a JSONL file. `on_record` receives the parsed
/// value and its 1-based record index. Parse failures raise FormatError naming
/// the record index.
void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const json&, std::size_t)>& on_record);

std::vector<json> read_jsonl(const std::filesystem::path& path);

/// Writes `lines` (already serialized) to `path` through a temp file and rename.
void write_lines_atomic(const std::filesystem::path& path, const std::vector<std::string>& lines);

void write_text_atomic(const std::filesystem::path& path, const std::string& text);

std::string read_text(const std::filesystem::path& path);

/// Append-only JSONL writer. Each append is flushed so a crash loses at most
/// the line being written.
class JsonlAppender {
 public:
  explicit JsonlAppender(const std::filesystem::path& path);

  void append(const json& value);

 private:
  std::mutex mu_;
  std::ofstream out_;
};

}  // namespace latchbench
