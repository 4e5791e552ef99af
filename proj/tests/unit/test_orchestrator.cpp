#include <doctest.h>

#include <fstream>
#include <sstream>

#include "latchbench/core/jsonl.hpp"
#include "latchbench/orchestrator/cli.hpp"
#include "latchbench/orchestrator/config.hpp"
#include "latchbench/orchestrator/ledger.hpp"
#include "latchbench/orchestrator/pipeline.hpp"
#include "latchbench/orchestrator/worker_pool.hpp"
#include "support.hpp"

using namespace latchbench;
using namespace latchbench::orchestrator;

namespace {

json synthetic_backend(const std::string& id) {
  return {{"id", id},
          {"kind", "synthetic"},
          {"simulator", {{"curve", {{"alpha", 1.0}, {"gamma", 0.3}}}, {"redirect_grounding", 0.9}}}};
}

/// Config with a synthetic corpus written next to it.
std::filesystem::path write_config(const std::filesystem::path& dir, std::size_t n, json overrides = json::object()) {
  forge::save_dialogues(dir / "corpus.jsonl", testing::synthetic_corpus(n, 17));
  json c = {{"experiment_id", "exp"},
            {"global_seed", 7},
            {"corpus", "corpus.jsonl"},
            {"tiers", json::array({{{"tier", "shallow"}}, {{"tier", "hijack"}}})},
            {"strategies", json::array({{{"kind", "vanilla"}, {"backend", synthetic_backend("syn")}},
                                        {{"kind", "ssrp"},
                                         {"architect", synthetic_backend("syn")},
                                         {"executive", synthetic_backend("syn")}},
                                        {{"kind", "reflexion"}, {"backend", synthetic_backend("syn")}}})},
            {"output_dir", "out"}};
  c.merge_patch(overrides);
  write_text_atomic(dir / "config.json", c.dump(2));
  return dir / "config.json";
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "latchbench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::string stores(const std::filesystem::path& exp) {
  std::string s;
  for (const char* f : {kTrajectoriesFile, kRunsFile, kVerdictsFile, "report.json", "report.csv", "curve_points.csv"}) {
    s += testing::slurp(exp / f);
  }
  return s;
}

}  // namespace

TEST_SUITE("orchestrator") {
  TEST_CASE("config parsing and validation") {
    const auto dir = testing::fresh_dir("config");
    const auto path = write_config(dir, 3);
    const auto c = load_config(path);
    CHECK(c.experiment_id == "exp");
    CHECK(c.corpus == dir / "corpus.jsonl");
    CHECK(c.tiers.size() == 2);
    CHECK(c.tiers[1].budget == 10000);
    CHECK(c.strategies.size() == 3);
    CHECK(c.judge.kind == backend::BackendKind::rule);
    CHECK(c.experiment_dir() == dir / "out" / "exp");
    check_launch_paths(c);

    auto expect_config_error = [&](json patch) {
      const auto p = write_config(dir, 3, std::move(patch));
      CHECK_THROWS_AS(load_config(p), ConfigError);
    };
    expect_config_error({{"experiment_id", "../escape"}});
    expect_config_error({{"parallelism", 0}});
    expect_config_error({{"update_mode", "dynamic"}});
    expect_config_error({{"tiers", json::array({{{"tier", "shallow"}}, {{"tier", "shallow"}}})}});
    expect_config_error({{"strategies", json::array({{{"kind", "vanilla"}, {"backend", synthetic_backend("a")}},
                                                     {{"kind", "vanilla"}, {"backend", synthetic_backend("b")}}})}});
    expect_config_error({{"strategies", json::array({{{"kind", "ssrp"}, {"architect", synthetic_backend("a")}}})}});
    CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
    write_text_atomic(dir / "broken.json", "{");
    CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
  }

  TEST_CASE("ledger") {
    const auto dir = testing::fresh_dir("ledger");
    CHECK(RunLedger::load(dir / "none.jsonl").entries().empty());
    write_lines_atomic(dir / "l.jsonl",
                       {canonical_dump(to_json(LedgerEntry{"run|a|v", EntryStatus::pending, "h", "", 0})),
                        canonical_dump(to_json(LedgerEntry{"run|a|v", EntryStatus::done, "h", "o", 3}))});
    const auto l = RunLedger::load(dir / "l.jsonl");
    CHECK(l.line_count() == 2);
    REQUIRE(l.latest("run|a|v"));
    CHECK(l.latest("run|a|v")->status == EntryStatus::done);
    CHECK(l.latest("run|b|v") == nullptr);
    write_lines_atomic(dir / "bad.jsonl", {"{not json"});
    CHECK_THROWS_AS(RunLedger::load(dir / "bad.jsonl"), LedgerError);
    write_lines_atomic(dir / "bad2.jsonl", {R"({"key":"k","status":"weird"})"});
    CHECK_THROWS_AS(RunLedger::load(dir / "bad2.jsonl"), LedgerError);
  }

  TEST_CASE("bounded worker pool delivers every result once") {
    for (std::size_t par : {1u, 3u, 8u}) {
      std::vector<int> seen(50, 0);
      run_bounded<int>(
          50, par, [](std::size_t i) { return static_cast<int>(i * i); },
          [&](std::size_t i, int&& v) {
            CHECK(v == static_cast<int>(i * i));
            ++seen[i];
            return true;
          });
      for (int s : seen) CHECK(s == 1);
    }
  }

  TEST_CASE("worker pool stops when the writer declines") {
    std::size_t delivered = run_bounded<int>(
        100, 4, [](std::size_t i) { return static_cast<int>(i); }, [](std::size_t, int&&) { return false; });
    CHECK(delivered == 1);
    CHECK_THROWS_AS(run_bounded<int>(
                        10, 2, [](std::size_t i) -> int { if (i == 3) throw DomainError("boom"); return 0; },
                        [](std::size_t, int&&) { return true; }),
                    DomainError);
  }

  TEST_CASE("seeds") {
    CHECK(pair_seed(1, "t", strategy::Strategy::ssrp) == pair_seed(1, "t", strategy::Strategy::ssrp));
    CHECK(pair_seed(1, "t", strategy::Strategy::ssrp) != pair_seed(1, "t", strategy::Strategy::vanilla));
    CHECK(trajectory_seed(1, "d", forge::Tier::shallow) != trajectory_seed(1, "d", forge::Tier::hijack));
  }

  TEST_CASE("full pipeline, resume and interruption") {
    const auto dir = testing::fresh_dir("pipeline");
    auto config = load_config(write_config(dir, 4));
    const auto exp = config.experiment_dir();

    const auto f = forge_build(config);
    CHECK(f.total == 8);
    CHECK(f.errors == 0);
    CHECK(forge::load_trajectories(exp / kTrajectoriesFile).size() == 8);
    const auto r = run_experiment(config);
    CHECK(r.total == 24);
    CHECK(r.executed == 24);
    const auto j = judge_experiment(config);
    CHECK(j.executed == 24);
    const auto report = score_experiment(config);
    CHECK(report.rows.size() == 6);
    const auto reference = stores(exp);

    // Resume reuses everything.
    const auto again = run_experiment(config, {true, std::nullopt, nullptr});
    CHECK(again.skipped == 24);
    CHECK(again.executed == 0);

    // An interrupted run finishes on resume with identical stores.
    const auto stopped = run_experiment(config, {false, 5, nullptr});
    CHECK(stopped.interrupted);
    CHECK(stopped.partial_failure());
    const auto finished = run_experiment(config, {true, std::nullopt, nullptr});
    CHECK(finished.skipped == 5);
    CHECK(finished.executed == 19);
    judge_experiment(config);
    score_experiment(config);
    CHECK(stores(exp) == reference);

    // A tampered store entry is re-executed.
    auto lines = read_jsonl(exp / kRunsFile);
    lines[0]["final_response"] = "tampered";
    std::vector<std::string> dumped;
    for (const auto& l : lines) dumped.push_back(canonical_dump(l));
    write_lines_atomic(exp / kRunsFile, dumped);
    const auto repaired = run_experiment(config, {true, std::nullopt, nullptr});
    CHECK(repaired.executed == 1);

    // Parallelism does not change the stores.
    config.parallelism = 4;
    run_experiment(config);
    judge_experiment(config);
    score_experiment(config);
    CHECK(stores(exp) == reference);

    // A corrupt ledger refuses to resume.
    std::ofstream(exp / kLedgerFile, std::ios::app) << "{garbage\n";
    CHECK_THROWS_AS(run_experiment(config, {true, std::nullopt, nullptr}), LedgerError);
  }

  TEST_CASE("cli exit codes") {
    const auto dir = testing::fresh_dir("cli");
    const auto cfg = write_config(dir, 2).string();
    CHECK(cli({"bogus"}) == kExitConfig);
    CHECK(cli({}) == kExitConfig);
    CHECK(cli({"run", "--config", (dir / "missing.json").string()}) == kExitConfig);
    std::string out;
    CHECK(cli({"forge", "build", "--config", cfg, "--dry-run"}, &out) == kExitOk);
    CHECK(out.find("nothing written") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dir / "out"));
    CHECK(cli({"forge", "build", "--config", cfg}) == kExitOk);
    CHECK(cli({"run", "--config", cfg}) == kExitOk);
    CHECK(cli({"judge", "--config", cfg}) == kExitOk);
    CHECK(cli({"score", "--config", cfg}, &out) == kExitOk);
    CHECK(out.find("vanilla") != std::string::npos);
    CHECK(cli({"report", "--config", cfg}) == kExitOk);
    for (const char* file : {"trajectories.jsonl", "runs.jsonl", "verdicts.jsonl", "ledger.jsonl", "report.json",
                             "report.csv", "curve_points.csv"}) {
      CHECK(std::filesystem::exists(dir / "out" / "exp" / file));
    }
    CHECK(cli({"run", "--config", cfg, "--resume"}) == kExitOk);
    CHECK(cli({"run", "--config", cfg, "--stop-after", "1"}) == kExitPartial);
    CHECK(cli({"simulate", "--config", cfg}) == kExitConfig);
  }

  TEST_CASE("cli forge import") {
    const auto dir = testing::fresh_dir("import");
    write_text_atomic(dir / "in.json",
                      R"([{"dialogue_id":"MUL0001.json","services":["hotel"],"turns":[{"speaker":"USER","utterance":"cheap hotel please"}]}])");
    CHECK(cli({"forge", "import", "--input", (dir / "in.json").string(), "--output", (dir / "c.jsonl").string(),
               "--dry-run"}) == kExitOk);
    CHECK_FALSE(std::filesystem::exists(dir / "c.jsonl"));
    CHECK(cli({"forge", "import", "--input", (dir / "in.json").string(), "--output", (dir / "c.jsonl").string()}) ==
          kExitOk);
    CHECK(forge::load_dialogues(dir / "c.jsonl").size() == 1);
  }

  TEST_CASE("cli simulate and ablations") {
    const auto dir = testing::fresh_dir("ablate");
    const auto cfg = write_config(dir, 3,
                                  {{"ablation_limit", 3},
                                   {"simulate", {{"simulator", {{"curve", {{"alpha", 1.0}, {"gamma", 0.2}}}}},
                                                 {"n", 2000}}}})
                         .string();
    std::string out;
    CHECK(cli({"simulate", "--config", cfg}, &out) == kExitOk);
    CHECK(out.find("fit: alpha=") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "out" / "exp" / "simulate.csv"));
    CHECK(cli({"ablate", "granularity", "--config", cfg}, &out) == kExitOk);
    CHECK(out.find("ssrp_verbose") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "out" / "exp-granularity" / "report.csv"));
    CHECK(cli({"ablate", "equidistant", "--config", cfg}) == kExitOk);
    CHECK(std::filesystem::exists(dir / "out" / "exp-equidistant" / "report.csv"));
  }
}
