#include "latchbench/core/jsonl.hpp"

#include <fmt/core.h>

#include <sstream>

#include "latchbench/core/error.hpp"

namespace latchbench {

std::string canonical_dump(const json& value) {
  return value.dump(-1, ' ', false, json::error_handler_t::strict);
}

void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const json&, std::size_t)>& on_record) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError(fmt::format("cannot read {}", path.string()));
  }
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++index;
    json value;
    try {
      value = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(fmt::format("{}: record {}: invalid JSON ({})", path.string(), index, e.what()));
    }
    on_record(value, index);
  }
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::vector<json> out;
  read_jsonl(path, [&](const json& v, std::size_t) { out.push_back(v); });
  return out;
}

void write_lines_atomic(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& l : lines) {
    text += l;
    text += '\n';
  }
  write_text_atomic(path, text);
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", tmp.string()));
    out << text;
    if (!out) throw Error(fmt::format("write failed for {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

JsonlAppender::JsonlAppender(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::app);
  if (!out_) throw Error(fmt::format("cannot open {} for append", path.string()));
}

void JsonlAppender::append(const json& value) {
  std::lock_guard lock(mu_);
  out_ << canonical_dump(value) << '\n';
  out_.flush();
}

}  // namespace latchbench
