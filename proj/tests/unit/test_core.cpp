#include <doctest.h>

#include <set>

#include "latchbench/core/error.hpp"
#include "latchbench/core/hash.hpp"
#include "latchbench/core/jsonl.hpp"
#include "latchbench/core/rng.hpp"
#include "latchbench/core/text.hpp"
#include "support.hpp"

using namespace latchbench;

TEST_SUITE("core") {
  TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("derive_seed depends only on its inputs") {
    const auto a = derive_seed(42, "MUL0001.json", "hijack");
    CHECK(a == derive_seed(42, "MUL0001.json", "hijack"));
    CHECK(a != derive_seed(43, "MUL0001.json", "hijack"));
    CHECK(a != derive_seed(42, "MUL0002.json", "hijack"));
    CHECK(a != derive_seed(42, "hijack", "MUL0001.json"));
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) seen.insert(derive_seed(7, std::to_string(i)));
    CHECK(seen.size() == 1000);
  }

  TEST_CASE("rng uniform range and reproducibility") {
    Rng a(5), b(5);
    double sum = 0;
    for (int i = 0; i < 10000; ++i) {
      const double u = a.uniform();
      CHECK(u == b.uniform());
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      sum += u;
    }
    CHECK(sum / 10000 == doctest::Approx(0.5).epsilon(0.02));
    Rng c(9);
    for (int i = 0; i < 1000; ++i) CHECK(c.below(7) < 7);
  }

  TEST_CASE("canonical dump sorts keys and strips whitespace") {
    const json j = json::parse(R"({"b": 1, "a": [1, 2, {"d": null, "c": "x"}]})");
    CHECK(canonical_dump(j) == R"({"a":[1,2,{"c":"x","d":null}],"b":1})");
  }

  TEST_CASE("jsonl round trip and error index") {
    const auto dir = testing::fresh_dir("jsonl");
    write_lines_atomic(dir / "a.jsonl", {R"({"x":1})", "", R"({"x":2})"});
    const auto rows = read_jsonl(dir / "a.jsonl");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1]["x"] == 2);
    write_lines_atomic(dir / "b.jsonl", {R"({"x":1})", "{broken"});
    try {
      read_jsonl(dir / "b.jsonl");
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
    {
      JsonlAppender app(dir / "c.jsonl");
      app.append({{"k", "v"}});
      app.append({{"k", "w"}});
    }
    CHECK(read_jsonl(dir / "c.jsonl").size() == 2);
  }

  TEST_CASE("text helpers") {
    CHECK(text::fold("  Hello \n\tWorld ") == "hello world");
    CHECK(text::count_sentences("One. Two! Three?") == 3);
    CHECK(text::count_sentences("Just one sentence.") == 1);
    CHECK(text::count_sentences("No terminator") == 1);
    CHECK(text::count_sentences("Meet at 10.30 today.") == 1);
    CHECK(text::contains_bounded("the cobalt pavilion 417.", "cobalt pavilion 417"));
    CHECK_FALSE(text::contains_bounded("the cobalt pavilion 4170", "cobalt pavilion 417"));
    CHECK_FALSE(text::contains_bounded("xcobalt pavilion 417", "cobalt pavilion 417"));
    CHECK(text::split_lines("a\nb\r\nc").size() == 3);
  }
}
