#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shortmk {

enum class ExtractStrategy { BoxedExpression, FinalAnswerLine, LastNumber };

std::string_view to_string(ExtractStrategy s);
std::optional<ExtractStrategy> extract_strategy_from_string(std::string_view s);

struct AnswerPolicy {
  std::vector<ExtractStrategy> extraction_order = {
      ExtractStrategy::BoxedExpression,
      ExtractStrategy::FinalAnswerLine,
      ExtractStrategy::LastNumber,
  };
  // Integer-valued comparison, for AIME/HMMT style answers.
  bool numeric_mode = true;

  void validate() const;  // extraction_order must be non-empty
};

// Strips whitespace and LaTeX spacing commands, collapses \boxed{X} to X,
// strips leading zeros from pure integers. Idempotent.
std::string normalize_answer(std::string_view raw);

// First strategy in policy.extraction_order that matches wins; result is
// normalized. nullopt when nothing matches.
std::optional<std::string> extract_answer(std::string_view text, const AnswerPolicy& policy);

bool grade(const std::optional<std::string>& extracted, std::string_view gold,
           const AnswerPolicy& policy);

}  // namespace shortmk
