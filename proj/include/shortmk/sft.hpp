#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shortmk/types.hpp"

namespace shortmk {

// Builds the short / long / random training-set variants by selecting one
// trajectory per prompt from a pool of generations.

struct SftExample {
  std::string question_id;
  std::string prompt;
  std::string trajectory;  // thinking text when logged, else the response text
  std::string answer;
  std::int64_t think_tokens = 0;
};

struct SftOptions {
  std::uint64_t rng_seed = 0;
  int n_per_prompt = 0;       // consider only the first n usable generations (0 = all)
  bool correct_only = false;  // restrict selection to correct generations
  int histogram_bins = 20;
};

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::int64_t count = 0;
};

struct SftVariants {
  std::vector<SftExample> shortest;
  std::vector<SftExample> longest;
  std::vector<SftExample> random;
  std::vector<std::string> skipped;  // prompts with zero usable generations
};

// Per prompt: short = minimal (think_tokens, sample_index), long = maximal,
// random = seeded uniform draw. All three variants contain the identical
// prompt set; prompts without usable generations go to the skip report.
// ThinkTruncated generations are never selected.
SftVariants build_variants(const std::vector<QuestionLog>& pool, const SftOptions& options);

// Equal-width bins over [lo, hi]; the right edge of the last bin is inclusive.
std::vector<HistogramBin> token_histogram(const std::vector<SftExample>& examples, int bins,
                                          double lo, double hi);

std::string variant_to_jsonl(const std::vector<SftExample>& examples);
std::string histogram_to_csv(const std::vector<HistogramBin>& bins);

}  // namespace shortmk
