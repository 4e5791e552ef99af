#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "latchbench/core/error.hpp"
#include "latchbench/core/jsonl.hpp"

namespace latchbench::orchestrator {

enum class EntryStatus { pending, done, error };

std::string_view to_string(EntryStatus s);
EntryStatus entry_status_from_string(std::string_view s);

/// One ledger line. Keys are "<stage>|<trajectory_id>|<label>".
struct LedgerEntry {
  std::string key;
  EntryStatus status = EntryStatus::pending;
  std::string input_hash;
  std::string output_hash;
  std::int64_t wall_time_ms = 0;
};

json to_json(const LedgerEntry& e);

/// The ledger cannot be trusted; a fresh run is required.
class LedgerError : public Error {
 public:
  using Error::Error;
};

/// Append-only ledger; the last entry for a key wins.
class RunLedger {
 public:
  /// Missing file gives an empty ledger. Any malformed line raises LedgerError.
  static RunLedger load(const std::filesystem::path& path);

  const LedgerEntry* latest(const std::string& key) const;
  const std::map<std::string, LedgerEntry>& entries() const { return latest_; }
  std::size_t line_count() const { return lines_; }

 private:
  std::map<std::string, LedgerEntry> latest_;
  std::size_t lines_ = 0;
};

}  // namespace latchbench::orchestrator
