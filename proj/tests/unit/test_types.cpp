#include <doctest.h>

#include "shortmk/jsonl.hpp"
#include "shortmk/rng.hpp"
#include "shortmk/types.hpp"
#include "test_util.hpp"

using namespace shortmk;
using testutil::make_log;
using testutil::rec;

TEST_CASE("validate_log clean and dirty cases") {
  std::vector<GenerationRecord> generations;
  for (int i = 0; i < 20; ++i) generations.push_back(rec("q", i, 10 + i, "7", true));
  CHECK(validate_log(make_log("q", generations)).empty());

  auto dup = generations;
  dup[4].sample_index = 3;
  auto violations = validate_log(make_log("q", dup));
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("(q, 3)") != std::string::npos);
  CHECK(violations[0].find("duplicate") != std::string::npos);

  auto truncated = generations;
  truncated[0].finish = Finish::ThinkTruncated;
  auto v2 = validate_log(make_log("q", truncated));
  REQUIRE(v2.size() == 1);
  CHECK(v2[0].find("truncated") != std::string::npos);

  auto mixed = generations;
  mixed[1].question_id = "other";
  CHECK(validate_log(make_log("q", mixed)).size() == 1);

  auto negative = generations;
  negative[2].duration_seconds = -1.0;
  CHECK(validate_log(make_log("q", negative)).size() == 1);
}

TEST_CASE("finish and tie break string round trips") {
  for (Finish f : {Finish::ThinkCompleted, Finish::ThinkTruncated, Finish::Cancelled,
                   Finish::Errored})
    CHECK(finish_from_string(to_string(f)) == f);
  for (TieBreak t : {TieBreak::Shortest, TieBreak::Random, TieBreak::Longest})
    CHECK(tie_break_from_string(to_string(t)) == t);
  CHECK_FALSE(finish_from_string("bogus").has_value());
}

TEST_CASE("RunConfig validation") {
  RunConfig config;
  CHECK_NOTHROW(config.validate());
  config.m = 6;
  CHECK_THROWS_AS(config.validate(), config_error);
  config.m = 1;
  config.temperature = 0.0;
  CHECK_THROWS_AS(config.validate(), config_error);
  config.temperature = 0.7;
  config.think_close = config.think_open;
  CHECK_THROWS_AS(config.validate(), config_error);
}

TEST_CASE("record serialization round-trips byte-identically") {
  GenerationRecord g = rec("q1", 3, 512, "73", true);
  g.duration_seconds = 1.25;
  std::string line = serialize_record(g);
  CHECK(serialize_record(parse_record(line)) == line);

  // Canonical line with every optional absent.
  GenerationRecord bare = rec("q1", 0, 0, std::nullopt, std::nullopt, Finish::Cancelled);
  bare.answer_raw = "";
  std::string bare_line = serialize_record(bare);
  CHECK(bare_line.find("answer_extracted") == std::string::npos);
  CHECK(serialize_record(parse_record(bare_line)) == bare_line);

  // Unknown fields survive a round trip, after the schema fields.
  std::string with_extra =
      R"({"question_id":"q1","sample_index":1,"think_tokens":9,"answer_raw":"x",)"
      R"("finish":"think_completed","custom":{"a":[1,2]},"zz":"keep"})";
  GenerationRecord parsed = parse_record(with_extra);
  REQUIRE(parsed.extras.size() == 2);
  CHECK(serialize_record(parsed) == with_extra);
}

TEST_CASE("record round-trip holds for randomized records") {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    GenerationRecord g;
    g.question_id = "q" + std::to_string(rng.uniform_below(50));
    g.sample_index = static_cast<int>(rng.uniform_below(40));
    g.think_tokens = static_cast<std::int64_t>(rng.uniform_below(100000));
    g.answer_raw = std::string("answer \"with\" esc\\apes\n") +
                   std::to_string(rng.uniform_below(1000));
    if (rng.uniform_below(2)) g.answer_extracted = std::to_string(rng.uniform_below(999));
    if (rng.uniform_below(2)) g.correct = rng.uniform_below(2) == 1;
    if (rng.uniform_below(2))
      g.duration_seconds = static_cast<double>(rng.uniform_below(10000)) / 64.0;
    g.finish = static_cast<Finish>(rng.uniform_below(4));
    if (rng.uniform_below(3) == 0) g.extras.emplace_back("extra", "[1,\"two\",3.5]");
    std::string line = serialize_record(g);
    std::string again = serialize_record(parse_record(line));
    CHECK(line == again);
  }
}

TEST_CASE("header serialization round-trips") {
  QuestionLog log = make_log("q9", {}, "42");
  log.model = "some-model";
  std::string line = serialize_header(log);
  QuestionLog parsed = parse_header(line);
  CHECK(parsed.question_id == "q9");
  CHECK(parsed.gold_answer == "42");
  CHECK(parsed.temperature == doctest::Approx(0.7));
  CHECK(serialize_header(parsed) == line);
  CHECK(classify_line(line) == LineKind::Header);
  CHECK(classify_line(serialize_record(rec("q9", 0, 1, "1", true))) == LineKind::Record);
}

TEST_CASE("enumeration labels") {
  CHECK(Enumeration{true, 0}.label() == "exact");
  CHECK(Enumeration{false, 10000}.label() == "mc:10000");
}
