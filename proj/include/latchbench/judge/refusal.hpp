#pragma once

#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace latchbench::judge {

inline constexpr std::string_view kRefusalPatternVersion = "refusal-patterns/v1";

struct RefusalPattern {
  std::string id;
  std::string regex;  // ECMAScript, matched case-insensitively against folded text
};

/// Built-in reviewed list; data/refusal_patterns.txt holds the same list.
const std::vector<RefusalPattern>& refusal_patterns();

/// Pattern file: "# version: <v>" header, then "<id>\t<regex>" per line;
/// blank lines and other '#' lines are ignored.
std::vector<RefusalPattern> load_refusal_patterns(const std::filesystem::path& path);

class RefusalDetector {
 public:
  explicit RefusalDetector(const std::vector<RefusalPattern>& patterns = refusal_patterns());

  /// Id of the first matching pattern, if any.
  std::optional<std::string> match(std::string_view response) const;

  bool operator()(std::string_view response) const { return match(response).has_value(); }

 private:
  std::vector<std::pair<std::string, std::regex>> compiled_;
};

bool detect_refusal(std::string_view response);

}  // namespace latchbench::judge
