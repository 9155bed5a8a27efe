#include "shortmk/types.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace shortmk {

std::string_view to_string(Finish f) {
  switch (f) {
    case Finish::ThinkCompleted: return "think_completed";
    case Finish::ThinkTruncated: return "think_truncated";
    case Finish::Cancelled: return "cancelled";
    case Finish::Errored: return "errored";
  }
  return "errored";
}

std::optional<Finish> finish_from_string(std::string_view s) {
  if (s == "think_completed") return Finish::ThinkCompleted;
  if (s == "think_truncated") return Finish::ThinkTruncated;
  if (s == "cancelled") return Finish::Cancelled;
  if (s == "errored") return Finish::Errored;
  return std::nullopt;
}

std::string_view to_string(TieBreak t) {
  switch (t) {
    case TieBreak::Shortest: return "shortest";
    case TieBreak::Random: return "random";
    case TieBreak::Longest: return "longest";
  }
  return "shortest";
}

std::optional<TieBreak> tie_break_from_string(std::string_view s) {
  if (s == "shortest") return TieBreak::Shortest;
  if (s == "random") return TieBreak::Random;
  if (s == "longest") return TieBreak::Longest;
  return std::nullopt;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::MajorityAtK: return "majority";
    case Method::ShortestMAtK: return "shortest_m";
    case Method::OraclePassAtK: return "oracle";
  }
  return "majority";
}

std::optional<Method> method_from_string(std::string_view s) {
  if (s == "majority") return Method::MajorityAtK;
  if (s == "shortest_m" || s == "shortest-m" || s == "shortest") return Method::ShortestMAtK;
  if (s == "oracle" || s == "pass" || s == "pass_at_k") return Method::OraclePassAtK;
  return std::nullopt;
}

std::string_view to_string(TokenUnit u) {
  switch (u) {
    case TokenUnit::Chunks: return "chunks";
    case TokenUnit::Whitespace: return "whitespace";
  }
  return "chunks";
}

std::optional<TokenUnit> token_unit_from_string(std::string_view s) {
  if (s == "chunks") return TokenUnit::Chunks;
  if (s == "whitespace") return TokenUnit::Whitespace;
  return std::nullopt;
}

int QuestionLog::usable_count() const {
  return static_cast<int>(
      std::count_if(generations.begin(), generations.end(),
                    [](const GenerationRecord& g) { return g.usable(); }));
}

void RunConfig::validate() const {
  if (k < 1) throw config_error("k must be >= 1, got " + std::to_string(k));
  if (m < 1 || m > k)
    throw config_error("m must satisfy 1 <= m <= k, got m=" + std::to_string(m) +
                       " k=" + std::to_string(k));
  if (!(temperature > 0)) throw config_error("temperature must be > 0");
  if (!(top_p > 0) || top_p > 1) throw config_error("top_p must be in (0, 1]");
  if (max_tokens < 1) throw config_error("max_tokens must be >= 1");
  if (think_open == think_close)
    throw config_error("think_open and think_close markers must differ");
  if (think_open.empty() || think_close.empty())
    throw config_error("think markers must be non-empty");
  if (retry_budget < 0) throw config_error("retry_budget must be >= 0");
}

std::string Enumeration::label() const {
  if (exact) return "exact";
  return "mc:" + std::to_string(samples);
}

std::vector<std::string> validate_log(const QuestionLog& log) {
  std::vector<std::string> violations;
  std::set<int> seen;
  for (const GenerationRecord& g : log.generations) {
    const std::string where =
        "(" + log.question_id + ", " + std::to_string(g.sample_index) + ")";
    if (g.question_id != log.question_id)
      violations.push_back(where + ": record question_id '" + g.question_id +
                           "' does not match log question_id");
    if (g.sample_index < 0) violations.push_back(where + ": sample_index is negative");
    if (!seen.insert(g.sample_index).second)
      violations.push_back(where + ": duplicate sample_index");
    if (g.think_tokens < 0) violations.push_back(where + ": think_tokens is negative");
    if (g.think_tokens == 0 && g.finish == Finish::ThinkTruncated)
      violations.push_back(where + ": think_tokens = 0 is not possible for a truncated thinking phase");
    if (g.finish == Finish::ThinkTruncated && g.correct.has_value())
      violations.push_back(where +
                           ": truncated-thinking records are excluded from grading but carry `correct`");
    if (g.duration_seconds && *g.duration_seconds < 0)
      violations.push_back(where + ": duration_seconds is negative");
  }
  return violations;
}

}  // namespace shortmk
