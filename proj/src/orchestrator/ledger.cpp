#include "latchbench/orchestrator/ledger.hpp"

#include <fmt/core.h>

namespace latchbench::orchestrator {

std::string_view to_string(EntryStatus s) {
  switch (s) {
    case EntryStatus::pending: return "pending";
    case EntryStatus::done: return "done";
    case EntryStatus::error: return "error";
  }
  return "?";
}

EntryStatus entry_status_from_string(std::string_view s) {
  if (s == "pending") return EntryStatus::pending;
  if (s == "done") return EntryStatus::done;
  if (s == "error") return EntryStatus::error;
  throw FormatError(fmt::format("unknown ledger status '{}'", s));
}

json to_json(const LedgerEntry& e) {
  return {{"key", e.key},
          {"status", to_string(e.status)},
          {"input_hash", e.input_hash},
          {"output_hash", e.output_hash},
          {"wall_time_ms", e.wall_time_ms}};
}

RunLedger RunLedger::load(const std::filesystem::path& path) {
  RunLedger ledger;
  if (!std::filesystem::exists(path)) return ledger;
  try {
    read_jsonl(path, [&](const json& j, std::size_t) {
      LedgerEntry e;
      e.key = j.at("key").get<std::string>();
      e.status = entry_status_from_string(j.at("status").get<std::string>());
      e.input_hash = j.at("input_hash").get<std::string>();
      e.output_hash = j.at("output_hash").get<std::string>();
      e.wall_time_ms = j.value("wall_time_ms", std::int64_t{0});
      ledger.latest_[e.key] = std::move(e);
      ++ledger.lines_;
    });
  } catch (const std::exception& e) {
    throw LedgerError(fmt::format("ledger {} is corrupt ({}); refusing to resume, start a fresh run without --resume",
                                  path.string(), e.what()));
  }
  return ledger;
}

const LedgerEntry* RunLedger::latest(const std::string& key) const {
  auto it = latest_.find(key);
  return it == latest_.end() ? nullptr : &it->second;
}

}  // namespace latchbench::orchestrator
