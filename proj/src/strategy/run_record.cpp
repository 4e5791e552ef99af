#include "latchbench/strategy/run_record.hpp"

#include <fmt/core.h>

#include "latchbench/core/hash.hpp"

namespace latchbench::strategy {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::vanilla: return "vanilla";
    case Strategy::ssrp: return "ssrp";
    case Strategy::reflexion: return "reflexion";
  }
  return "?";
}

Strategy strategy_from_string(std::string_view s) {
  if (s == "vanilla") return Strategy::vanilla;
  if (s == "ssrp") return Strategy::ssrp;
  if (s == "reflexion") return Strategy::reflexion;
  throw ConfigError(fmt::format("unknown strategy '{}'", s));
}

json to_json(const AgentRunRecord& r, const std::optional<std::filesystem::path>& blob_dir) {
  json prompts = json::array();
  for (const auto& p : r.prompts) {
    auto arr = backend::to_json(p);
    if (blob_dir) {
      auto text = canonical_dump(arr);
      if (text.size() > kBlobThresholdBytes) {
        const auto hash = sha256_hex(text);
        std::filesystem::create_directories(*blob_dir);
        const auto path = *blob_dir / (hash + ".json");
        if (!std::filesystem::exists(path)) write_text_atomic(path, text);
        arr = json{{"blob", hash}};
      }
    }
    prompts.push_back(std::move(arr));
  }
  json j = {{"trajectory_id", r.trajectory_id},
            {"strategy", to_string(r.strategy)},
            {"label", r.label},
            {"backend_ids", {{"primary", r.primary_backend}, {"secondary", r.secondary_backend ? json(*r.secondary_backend) : json(nullptr)}}},
            {"prompts", prompts},
            {"responses", r.responses},
            {"final_response", r.final_response},
            {"protocol", r.protocol ? to_json(*r.protocol) : json(nullptr)},
            {"call_count", r.call_count},
            {"repair_calls", r.repair_calls},
            {"prompt_version", r.prompt_version},
            {"seed", r.seed},
            {"tier", r.tier},
            {"model_pair", r.model_pair},
            {"granularity", r.granularity ? json(*r.granularity) : json(nullptr)}};
  j["error"] = r.error ? json{{"stage", r.error->stage}, {"kind", r.error->kind}, {"message", r.error->message}}
                       : json(nullptr);
  return j;
}

AgentRunRecord run_record_from_json(const json& j, const std::optional<std::filesystem::path>& blob_dir) {
  AgentRunRecord r;
  try {
    r.trajectory_id = j.at("trajectory_id").get<std::string>();
    r.strategy = strategy_from_string(j.at("strategy").get<std::string>());
    r.label = j.value("label", std::string(to_string(r.strategy)));
    const auto& ids = j.at("backend_ids");
    r.primary_backend = ids.at("primary").get<std::string>();
    if (ids.contains("secondary") && !ids["secondary"].is_null()) r.secondary_backend = ids["secondary"].get<std::string>();
    for (const auto& p : j.at("prompts")) {
      if (p.is_object() && p.contains("blob")) {
        if (!blob_dir) throw FormatError("run record references a prompt blob but no blob directory was given");
        const auto hash = p["blob"].get<std::string>();
        const auto text = read_text(*blob_dir / (hash + ".json"));
        if (sha256_hex(text) != hash) throw FormatError(fmt::format("prompt blob {} does not match its hash", hash));
        r.prompts.push_back(backend::messages_from_json(json::parse(text)));
      } else {
        r.prompts.push_back(backend::messages_from_json(p));
      }
    }
    r.responses = j.at("responses").get<std::vector<std::string>>();
    r.final_response = j.at("final_response").get<std::string>();
    if (!j.at("protocol").is_null()) r.protocol = protocol_from_json(j["protocol"]);
    r.call_count = j.at("call_count").get<int>();
    r.repair_calls = j.value("repair_calls", 0);
    r.prompt_version = j.value("prompt_version", "");
    r.seed = j.value("seed", std::uint64_t{0});
    r.tier = j.value("tier", "");
    r.model_pair = j.value("model_pair", "");
    if (j.contains("granularity") && !j["granularity"].is_null()) r.granularity = j["granularity"].get<std::string>();
    if (j.contains("error") && !j["error"].is_null()) {
      const auto& e = j["error"];
      r.error = RunError{e.at("stage").get<std::string>(), e.at("kind").get<std::string>(),
                         e.at("message").get<std::string>()};
    }
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("malformed run record: {}", e.what()));
  }
  return r;
}

}  // namespace latchbench::strategy
