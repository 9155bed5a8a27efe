#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shortmk/answers.hpp"
#include "shortmk/types.hpp"

namespace shortmk {

enum class StreamPhase { AwaitingThinkOpen, Thinking, Answering, Done, Cancelled, Failed };

std::string_view to_string(StreamPhase p);

// Legal transitions: AwaitingThinkOpen -> Thinking -> Answering -> Done,
// with Cancelled/Failed reachable from any non-terminal phase.
bool phase_transition_allowed(StreamPhase from, StreamPhase to);

struct StreamState {
  int sample_index = 0;
  StreamPhase phase = StreamPhase::AwaitingThinkOpen;
  std::int64_t think_tokens_so_far = 0;
  std::string answer_buffer;
  double started_at = 0.0;
  double think_closed_at = 0.0;

  // Throws std::logic_error on an illegal transition.
  void advance(StreamPhase next);
  void add_think_tokens(std::int64_t n);
};

struct PromptSpec {
  std::string question_id;
  std::string prompt;
  std::string gold_answer;  // empty = ungraded
};

struct RaceResult {
  std::optional<std::string> chosen_answer;
  bool degraded = false;  // fewer than m streams finished thinking
  int finishers = 0;
  QuestionLog log;
};

// Live shortest-m@k: races config.k concurrent streaming completions,
// cancels every stream still thinking the moment the m-th think-close
// arrives, lets the winners finish their answers, and votes among them.
// Throws transport_error when no stream can be started, and a race error
// (data_error) when zero streams finish thinking.
RaceResult race_question(const RunConfig& config, const PromptSpec& prompt,
                         const AnswerPolicy& policy = {});

// Builds a replay corpus: n_samples completions per prompt, all run to
// completion (no cancellation), graded when a gold answer is present.
// Connect failures are retried up to config.retry_budget times; failed
// streams are logged as Errored and the run continues.
std::vector<QuestionLog> generate_pool(const RunConfig& config,
                                       std::span<const PromptSpec> prompts, int n_samples,
                                       const AnswerPolicy& policy = {});

// JSONL prompt files: {"question_id":..., "prompt":..., "gold_answer":...}.
std::vector<PromptSpec> read_prompts_file(const std::string& path);

}  // namespace shortmk
