#include <doctest.h>

#include <stdexcept>

#include "shortmk/answers.hpp"
#include "shortmk/rng.hpp"

using namespace shortmk;

TEST_CASE("boxed extraction with normalization") {
  AnswerPolicy policy;
  CHECK(extract_answer("... so the answer is \\boxed{073}.", policy) == "73");
  CHECK(extract_answer("first \\boxed{1} then \\boxed{\\frac{1}{2}}", policy) ==
        "\\frac{1}{2}");
  CHECK(extract_answer("nested \\boxed{a{b}c}", policy) == "a{b}c");
  CHECK(extract_answer("spacing \\boxed{12\\,345}", policy) == "12345");
}

TEST_CASE("final answer line") {
  AnswerPolicy policy;
  policy.extraction_order = {ExtractStrategy::FinalAnswerLine};
  CHECK(extract_answer("The answer is 204", policy) == "204");
  CHECK(extract_answer("ANSWER: 17.", policy) == "17");
  CHECK(extract_answer("the final answer is: 99\nmore text", policy) == "99");
  CHECK_FALSE(extract_answer("no conclusion reached", policy).has_value());
}

TEST_CASE("last number fallback") {
  AnswerPolicy policy;
  policy.extraction_order = {ExtractStrategy::LastNumber};
  CHECK(extract_answer("try 12 then 15 finally 204", policy) == "204");
  CHECK(extract_answer("value -3.5 here", policy) == "-3.5");
  CHECK_FALSE(extract_answer("none at all", policy).has_value());
}

TEST_CASE("strategy order decides") {
  AnswerPolicy policy;  // boxed, then answer-line, then last number
  CHECK(extract_answer("The answer is 10 but \\boxed{20}", policy) == "20");
  policy.extraction_order = {ExtractStrategy::FinalAnswerLine, ExtractStrategy::BoxedExpression};
  CHECK(extract_answer("The answer is 10 but \\boxed{20}", policy) == "10");
  policy.extraction_order = {};
  CHECK_THROWS_AS(extract_answer("x", policy), std::invalid_argument);
}

TEST_CASE("normalization rules") {
  CHECK(normalize_answer("  73  ") == "73");
  CHECK(normalize_answer("073") == "73");
  CHECK(normalize_answer("0") == "0");
  CHECK(normalize_answer("000") == "0");
  CHECK(normalize_answer("-07") == "-7");
  CHECK(normalize_answer("-0") == "0");
  CHECK(normalize_answer("\\boxed{42}") == "42");
  CHECK(normalize_answer("1\\,000") == "1000");
  CHECK(normalize_answer("x\\quad y") == "xy");
  CHECK(normalize_answer("007.5") == "007.5");  // not a pure integer
}

TEST_CASE("normalization is idempotent") {
  Rng rng(8);
  const char* samples[] = {"073",    " 42 ",      "\\boxed{009}", "a\\;b",
                           "-00012", "12\\,345",  "hello world",  "3.14",
                           "",       "\\boxed{\\boxed{5}}"};
  for (const char* s : samples) CHECK(normalize_answer(normalize_answer(s)) == normalize_answer(s));
  for (int trial = 0; trial < 200; ++trial) {
    std::string s;
    for (int i = 0; i < 12; ++i)
      s.push_back("0123456789 \\{}bxoed-"[rng.uniform_below(20)]);
    CHECK(normalize_answer(normalize_answer(s)) == normalize_answer(s));
  }
}

TEST_CASE("grading") {
  AnswerPolicy policy;
  CHECK(grade(std::string("73"), "73", policy));
  CHECK_FALSE(grade(std::nullopt, "10", policy));
  CHECK(grade(std::string("7"), "07", policy));  // numeric mode
  policy.numeric_mode = false;
  CHECK_FALSE(grade(std::string("7"), "07", policy));
  CHECK(grade(std::string("abc"), "abc", policy));
  policy.numeric_mode = true;
  CHECK_FALSE(grade(std::string("xyz"), "7", policy));
  CHECK(grade(std::string("xyz"), "xyz", policy));  // non-numeric falls back to equality
}
