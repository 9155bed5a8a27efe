#include <doctest.h>

#include <set>

#include "shortmk/sft.hpp"
#include "test_util.hpp"

using namespace shortmk;
using testutil::make_log;
using testutil::rec;

TEST_CASE("build_variants selection per prompt") {
  QuestionLog log = make_log("q", {rec("q", 0, 100, "a", true), rec("q", 1, 50, "b", false),
                                   rec("q", 2, 200, "c", true)});
  SftOptions options;
  SftVariants variants = build_variants({log}, options);
  REQUIRE(variants.shortest.size() == 1);
  CHECK(variants.shortest[0].think_tokens == 50);
  CHECK(variants.longest[0].think_tokens == 200);
  CHECK(variants.random[0].think_tokens >= 50);
  CHECK(variants.skipped.empty());
}

TEST_CASE("variants share the prompt set and skip unusable prompts") {
  QuestionLog good = make_log("good", {rec("good", 0, 10, "a", true)});
  QuestionLog bad = make_log("bad", {rec("bad", 0, 999, std::nullopt, std::nullopt,
                                         Finish::ThinkTruncated)});
  SftVariants variants = build_variants({good, bad}, {});
  CHECK(variants.shortest.size() == 1);
  CHECK(variants.longest.size() == 1);
  CHECK(variants.random.size() == 1);
  REQUIRE(variants.skipped.size() == 1);
  CHECK(variants.skipped[0] == "bad");

  std::set<std::string> prompts;
  for (const SftExample& e : variants.shortest) prompts.insert(e.question_id);
  for (const SftExample& e : variants.longest) CHECK(prompts.count(e.question_id));
  for (const SftExample& e : variants.random) CHECK(prompts.count(e.question_id));
}

TEST_CASE("per-prompt ordering short <= random <= long and seed stability") {
  Rng gen(15);
  std::vector<QuestionLog> pool;
  for (int q = 0; q < 40; ++q) pool.push_back(testutil::random_log(gen, "q" + std::to_string(q), 10));

  SftOptions options;
  options.rng_seed = 9;
  SftVariants a = build_variants(pool, options);
  SftVariants b = build_variants(pool, options);
  double mean_short = 0, mean_long = 0, mean_random = 0;
  for (std::size_t i = 0; i < a.shortest.size(); ++i) {
    CHECK(a.shortest[i].think_tokens <= a.random[i].think_tokens);
    CHECK(a.random[i].think_tokens <= a.longest[i].think_tokens);
    CHECK(a.random[i].think_tokens == b.random[i].think_tokens);  // fixed seed
    mean_short += static_cast<double>(a.shortest[i].think_tokens);
    mean_long += static_cast<double>(a.longest[i].think_tokens);
    mean_random += static_cast<double>(a.random[i].think_tokens);
  }
  CHECK(mean_short <= mean_random);
  CHECK(mean_random <= mean_long);
  CHECK(variant_to_jsonl(a.random) == variant_to_jsonl(b.random));

  SftOptions other_seed;
  other_seed.rng_seed = 10;
  SftVariants c = build_variants(pool, other_seed);
  bool any_different = false;
  for (std::size_t i = 0; i < a.random.size(); ++i)
    any_different = any_different || a.random[i].think_tokens != c.random[i].think_tokens;
  CHECK(any_different);
}

TEST_CASE("correct_only and n_per_prompt filters") {
  QuestionLog log = make_log("q", {rec("q", 0, 10, "x", false), rec("q", 1, 20, "g", true),
                                   rec("q", 2, 30, "g", true)});
  SftOptions options;
  options.correct_only = true;
  SftVariants variants = build_variants({log}, options);
  CHECK(variants.shortest[0].think_tokens == 20);

  SftOptions capped;
  capped.n_per_prompt = 2;  // only sample_index 0 and 1 considered
  SftVariants first_two = build_variants({log}, capped);
  CHECK(first_two.longest[0].think_tokens == 20);
}

TEST_CASE("histogram conservation and edges") {
  std::vector<SftExample> examples;
  for (int i = 0; i < 37; ++i) {
    SftExample e;
    e.think_tokens = i * 3;
    examples.push_back(e);
  }
  auto bins = token_histogram(examples, 8, 0.0, 108.0);
  REQUIRE(bins.size() == 8);
  std::int64_t total = 0;
  for (const HistogramBin& b : bins) total += b.count;
  CHECK(total == 37);
  CHECK(bins.front().left == doctest::Approx(0.0));
  CHECK(bins.back().right == doctest::Approx(108.0));

  std::string csv = histogram_to_csv(bins);
  CHECK(csv.rfind("bin_left,bin_right,count\n", 0) == 0);
}

TEST_CASE("trajectory prefers captured thinking text") {
  GenerationRecord g = rec("q", 0, 5, "7", true);
  g.extras.emplace_back("think_text", "\"step by step\"");
  QuestionLog log = make_log("q", {g});
  SftVariants variants = build_variants({log}, {});
  CHECK(variants.shortest[0].trajectory == "step by step");
  CHECK(variants.shortest[0].answer == "7");

  GenerationRecord plain = rec("q2", 0, 5, "9", true);
  plain.answer_raw = "the long way to 9";
  QuestionLog log2 = make_log("q2", {plain});
  SftVariants fallback = build_variants({log2}, {});
  CHECK(fallback.shortest[0].trajectory == "the long way to 9");
}
