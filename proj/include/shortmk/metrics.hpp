#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shortmk/rng.hpp"
#include "shortmk/types.hpp"

namespace shortmk {

// --- pools -----------------------------------------------------------------

struct RankedEntry {
  std::int64_t think_tokens = 0;
  int sample_index = 0;
  bool correct = false;
  std::optional<std::string> answer;
  std::optional<double> duration_seconds;
};

// Usable generations of one question, sorted ascending by
// (think_tokens, sample_index). The stable total order is what every
// subset-based metric ranks by.
struct RankedPool {
  std::vector<RankedEntry> entries;

  int n() const { return static_cast<int>(entries.size()); }
  int c() const;  // number correct

  static RankedPool from_log(const QuestionLog& log);
  static RankedPool from_entries(std::vector<RankedEntry> entries);
};

// --- closed forms ------------------------------------------------------------

// Unbiased pass@k estimator: 1 - C(n-c, k)/C(n, k), running-product form.
double pass_at_k(int n, int c, int k);

// Expected correctness of the shortest element of a uniform k-subset:
// sum_i correct_i * C(n-i, k-1)/C(n, k), entries 1-indexed in ascending
// length order.
double rank_score_at_k(const RankedPool& pool, int k);

// --- voting ------------------------------------------------------------------

struct VoteCandidate {
  std::optional<std::string> answer;  // nullopt counts as a distinct no-answer value
  std::int64_t think_tokens = 0;
  bool correct = false;
};

struct VoteResult {
  std::optional<std::string> answer;
  std::int64_t think_tokens = 0;
  std::size_t candidate_index = 0;  // representative position in the input list
  bool correct = false;
};

// Majority vote with the configured tie policy. Among vote-leading answers,
// Shortest picks the one whose minimal representative chain is shortest
// (length ties go to the earlier candidate), Longest is the mirror, Random
// draws uniformly from the leaders.
VoteResult majority_vote(std::span<const VoteCandidate> candidates, TieBreak tie_break,
                         Rng& rng);

// --- per-subset outcomes -----------------------------------------------------

// All three take one k-subset of ThinkCompleted records.
SubsetOutcome shortest_m_outcome(std::span<const GenerationRecord> subset, int m,
                                 TieBreak tie_break, Rng& rng);
SubsetOutcome majority_outcome(std::span<const GenerationRecord> subset,
                               TieBreak tie_break, Rng& rng);
SubsetOutcome oracle_outcome(std::span<const GenerationRecord> subset);

// --- curve evaluation ----------------------------------------------------------

struct CurveRequest {
  std::vector<Method> methods = {Method::MajorityAtK, Method::ShortestMAtK,
                                 Method::OraclePassAtK};
  std::vector<int> k_set = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> m_set = {1, 3};
  TieBreak tie_break = TieBreak::Shortest;          // shortest-m vote
  TieBreak majority_tie_break = TieBreak::Random;   // baseline vote
  std::int64_t exact_threshold = 250000;            // max subsets enumerated exactly
  int mc_samples = 10000;
  std::uint64_t rng_seed = 0;
  int workers = 0;  // 0 = hardware concurrency
};

// Mean outcome per (method, k, m) over all C(n,k) subsets of each question
// (seeded Monte-Carlo above exact_threshold), aggregated unweighted across
// questions. pass@k and rank-score@k accuracies always use their closed
// forms. m values above k degenerate to waiting for all k streams and are
// evaluated with m clamped to k. Throws data_error when a question's usable
// pool is smaller than a requested k.
std::vector<CurvePoint> evaluate_curves(const std::vector<QuestionLog>& logs,
                                        const CurveRequest& request);

// --- report operations ---------------------------------------------------------

struct TercileGroup {
  std::string name;  // "easy" / "medium" / "hard"
  std::vector<std::string> question_ids;
  std::optional<double> correct_mean;    // absent when the group has no correct records
  std::optional<double> incorrect_mean;  // absent when the group has no incorrect records
  double all_mean = 0.0;
  double success_rate = 0.0;  // mean per-question success rate
};

struct TercileReport {
  std::array<TercileGroup, 3> groups;
};

// Questions sorted by success rate descending (ties by question_id), split
// into three contiguous groups, remainder to the earlier groups. Token means
// cover ThinkCompleted records only. Throws data_error for < 3 questions.
TercileReport difficulty_terciles(const std::vector<QuestionLog>& logs);

struct SelectionRow {
  double mean_tokens = 0.0;
  double mean_accuracy = 0.0;
};

struct SelectionReport {
  SelectionRow shortest;
  SelectionRow longest;
  SelectionRow random;
  int delta_shortest_pct = 0;  // integer percent vs the random row
  int delta_longest_pct = 0;
  bool expectation_mode = true;
  int n_questions = 0;
};

// Shortest/longest/random selection per question. In expectation mode the
// random row is the exact mean over all usable records; otherwise one seeded
// uniform draw per question.
SelectionReport short_long_random_report(const std::vector<QuestionLog>& logs,
                                         std::uint64_t rng_seed,
                                         bool random_expectation = true);

// Exact C(n,k) with saturation at cap (used for the exact/Monte-Carlo switch).
std::uint64_t binomial_capped(int n, int k, std::uint64_t cap);

}  // namespace shortmk
