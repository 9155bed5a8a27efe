#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shortmk {

// Exit-code-relevant error categories (see tools/shortmk_main.cpp).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct transport_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Finish { ThinkCompleted, ThinkTruncated, Cancelled, Errored };

std::string_view to_string(Finish f);
std::optional<Finish> finish_from_string(std::string_view s);

enum class TieBreak { Shortest, Random, Longest };

std::string_view to_string(TieBreak t);
std::optional<TieBreak> tie_break_from_string(std::string_view s);

enum class Method { MajorityAtK, ShortestMAtK, OraclePassAtK };

std::string_view to_string(Method m);
std::optional<Method> method_from_string(std::string_view s);

// Unknown JSONL fields, kept verbatim (key, raw JSON value) so round-trips
// preserve them byte for byte.
using ExtraFields = std::vector<std::pair<std::string, std::string>>;

// One sampled completion. think_tokens is the count between the think-open
// and think-close markers, recorded at generation time; replay never
// re-tokenizes text.
struct GenerationRecord {
  std::string question_id;
  int sample_index = 0;
  std::int64_t think_tokens = 0;
  std::string answer_raw;
  std::optional<std::string> answer_extracted;
  std::optional<bool> correct;
  std::optional<double> duration_seconds;
  Finish finish = Finish::ThinkCompleted;
  ExtraFields extras;

  bool usable() const { return finish == Finish::ThinkCompleted; }
};

// A question, its gold answer, and its recorded generations.
struct QuestionLog {
  std::string question_id;
  std::string prompt;
  std::string gold_answer;
  std::string model;
  double temperature = 0.7;
  double top_p = 0.95;
  std::vector<GenerationRecord> generations;
  ExtraFields extras;

  // Usable pool size: generations whose thinking completed.
  int usable_count() const;
};

enum class TokenUnit { Chunks, Whitespace };

std::string_view to_string(TokenUnit u);
std::optional<TokenUnit> token_unit_from_string(std::string_view s);

struct RunConfig {
  std::string endpoint_url = "http://127.0.0.1:8000/v1";
  std::string model_name = "default";
  double temperature = 0.7;
  double top_p = 0.95;
  int max_tokens = 32768;
  std::string think_open = "<think>";
  std::string think_close = "</think>";
  int k = 5;
  int m = 1;
  TieBreak tie_break = TieBreak::Shortest;
  std::uint64_t rng_seed = 0;
  std::string api_key_env = "OPENAI_API_KEY";

  // Plumbing knobs, not part of the wire contract.
  TokenUnit count_unit = TokenUnit::Chunks;
  int retry_budget = 2;
  double connect_timeout_s = 10.0;
  double read_timeout_s = 600.0;
  bool log_think_text = false;

  // Throws config_error on invariant breach (m > k, bad temperature, ...).
  void validate() const;
};

struct SubsetOutcome {
  Method method = Method::MajorityAtK;
  std::optional<std::string> chosen_answer;
  bool correct = false;
  std::int64_t compute_tokens = 0;
  double time_proxy = 0.0;
};

struct Enumeration {
  bool exact = true;
  int samples = 0;  // Monte-Carlo draw count when !exact

  std::string label() const;
  bool operator==(const Enumeration&) const = default;
};

struct CurvePoint {
  Method method = Method::MajorityAtK;
  int k = 1;
  std::optional<int> m;  // absent for majority/oracle
  double accuracy_mean = 0.0;
  double compute_mean = 0.0;
  double time_mean = 0.0;
  int n_questions = 0;
  Enumeration enumeration;
};

// Pure invariant check; violations are data, not failures.
std::vector<std::string> validate_log(const QuestionLog& log);

}  // namespace shortmk
