#include "shortmk/answers.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <stdexcept>

namespace shortmk {

std::string_view to_string(ExtractStrategy s) {
  switch (s) {
    case ExtractStrategy::BoxedExpression: return "boxed";
    case ExtractStrategy::FinalAnswerLine: return "final_answer_line";
    case ExtractStrategy::LastNumber: return "last_number";
  }
  return "boxed";
}

std::optional<ExtractStrategy> extract_strategy_from_string(std::string_view s) {
  if (s == "boxed") return ExtractStrategy::BoxedExpression;
  if (s == "final_answer_line") return ExtractStrategy::FinalAnswerLine;
  if (s == "last_number") return ExtractStrategy::LastNumber;
  return std::nullopt;
}

void AnswerPolicy::validate() const {
  if (extraction_order.empty())
    throw std::invalid_argument("AnswerPolicy.extraction_order must be non-empty");
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Finds the content of the last \boxed{...}, brace-balanced.
std::optional<std::string> last_boxed(std::string_view text) {
  const std::string_view marker = "\\boxed{";
  std::size_t search_end = text.size();
  for (;;) {
    std::size_t pos = text.rfind(marker, search_end == 0 ? 0 : search_end - 1);
    if (pos == std::string_view::npos) return std::nullopt;
    std::size_t i = pos + marker.size();
    int depth = 1;
    std::string content;
    for (; i < text.size(); ++i) {
      char c = text[i];
      if (c == '{') ++depth;
      if (c == '}') {
        --depth;
        if (depth == 0) return content;
      }
      content.push_back(c);
    }
    // Unbalanced; try an earlier occurrence.
    if (pos == 0) return std::nullopt;
    search_end = pos;
  }
}

bool iequal_at(std::string_view text, std::size_t pos, std::string_view word) {
  if (pos + word.size() > text.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) != word[i]) return false;
  return true;
}

// Last case-insensitive "answer is" / "answer:" match; captures to end of line.
std::optional<std::string> final_answer_line(std::string_view text) {
  std::optional<std::size_t> best;
  for (std::size_t pos = 0; pos + 6 <= text.size(); ++pos) {
    if (!iequal_at(text, pos, "answer")) continue;
    std::size_t after = pos + 6;
    while (after < text.size() && (text[after] == ' ' || text[after] == '\t')) ++after;
    std::size_t tail = 0;
    if (after < text.size() && text[after] == ':') {
      tail = after + 1;
    } else if (iequal_at(text, after, "is")) {
      tail = after + 2;
      if (tail < text.size() && text[tail] == ':') ++tail;
    } else {
      continue;
    }
    best = tail;
  }
  if (!best) return std::nullopt;
  std::size_t eol = text.find('\n', *best);
  std::string_view rest = text.substr(*best, eol == std::string_view::npos ? std::string_view::npos
                                                                           : eol - *best);
  rest = trim(rest);
  // Drop trailing sentence punctuation.
  while (!rest.empty() && (rest.back() == '.' || rest.back() == '!' || rest.back() == '?' ||
                           rest.back() == ',' || rest.back() == ';'))
    rest.remove_suffix(1);
  rest = trim(rest);
  if (rest.empty()) return std::nullopt;
  return std::string(rest);
}

std::optional<std::string> last_number(std::string_view text) {
  std::optional<std::string> found;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    bool sign = (c == '-') && i + 1 < text.size() &&
                std::isdigit(static_cast<unsigned char>(text[i + 1]));
    if (sign || std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = i;
      if (sign) ++i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (i + 1 < text.size() && text[i] == '.' &&
          std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      }
      found = std::string(text.substr(start, i - start));
    } else {
      ++i;
    }
  }
  return found;
}

bool is_pure_integer(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::optional<long long> parse_integer(std::string_view s) {
  if (!is_pure_integer(s)) return std::nullopt;
  long long value = 0;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto res = std::from_chars(first, s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace

std::string normalize_answer(std::string_view raw) {
  std::string s(trim(raw));

  // Unwrap \boxed{...} if the whole answer is one.
  for (;;) {
    std::string_view v = trim(s);
    if (v.size() >= 8 && v.substr(0, 7) == "\\boxed{" && v.back() == '}') {
      int depth = 0;
      bool whole = true;
      for (std::size_t i = 7; i + 1 < v.size(); ++i) {
        if (v[i] == '{') ++depth;
        if (v[i] == '}') {
          if (depth == 0) { whole = false; break; }
          --depth;
        }
      }
      if (whole && depth == 0) {
        s = std::string(v.substr(7, v.size() - 8));
        continue;
      }
    }
    s = std::string(v);
    break;
  }

  // Strip LaTeX spacing commands.
  static const std::string_view spacing[] = {"\\quad", "\\qquad", "\\,", "\\;", "\\:",
                                             "\\!",    "\\ "};
  std::string cleaned;
  cleaned.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    bool matched = false;
    for (std::string_view cmd : spacing) {
      if (s.compare(i, cmd.size(), cmd) == 0) {
        i += cmd.size();
        matched = true;
        break;
      }
    }
    if (!matched) cleaned.push_back(s[i++]);
  }
  std::string_view v = trim(cleaned);
  std::string out(v);

  if (is_pure_integer(out)) {
    bool neg = !out.empty() && out.front() == '-';
    std::string_view digits(out);
    if (neg || (!out.empty() && out.front() == '+')) digits.remove_prefix(1);
    while (digits.size() > 1 && digits.front() == '0') digits.remove_prefix(1);
    out = (neg && digits != "0") ? "-" + std::string(digits) : std::string(digits);
  }
  return out;
}

std::optional<std::string> extract_answer(std::string_view text, const AnswerPolicy& policy) {
  policy.validate();
  for (ExtractStrategy strategy : policy.extraction_order) {
    std::optional<std::string> hit;
    switch (strategy) {
      case ExtractStrategy::BoxedExpression: hit = last_boxed(text); break;
      case ExtractStrategy::FinalAnswerLine: hit = final_answer_line(text); break;
      case ExtractStrategy::LastNumber: hit = last_number(text); break;
    }
    if (hit) {
      std::string norm = normalize_answer(*hit);
      if (!norm.empty()) return norm;
    }
  }
  return std::nullopt;
}

bool grade(const std::optional<std::string>& extracted, std::string_view gold,
           const AnswerPolicy& policy) {
  if (!extracted) return false;
  if (policy.numeric_mode) {
    auto a = parse_integer(*extracted);
    auto b = parse_integer(gold);
    if (a && b) return *a == *b;
  }
  return *extracted == gold;
}

}  // namespace shortmk
