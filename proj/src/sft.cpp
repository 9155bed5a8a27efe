#include "shortmk/sft.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "shortmk/jsonl.hpp"
#include "shortmk/rng.hpp"

namespace shortmk {

namespace {

std::string trajectory_of(const GenerationRecord& rec) {
  for (const auto& [key, raw] : rec.extras) {
    if (key != "think_text") continue;
    nlohmann::json v = nlohmann::json::parse(raw, nullptr, false);
    if (v.is_string()) return v.get<std::string>();
  }
  return rec.answer_raw;
}

SftExample make_example(const QuestionLog& log, const GenerationRecord& rec) {
  SftExample e;
  e.question_id = log.question_id;
  e.prompt = log.prompt;
  e.trajectory = trajectory_of(rec);
  e.answer = rec.answer_extracted.value_or("");
  e.think_tokens = rec.think_tokens;
  return e;
}

}  // namespace

SftVariants build_variants(const std::vector<QuestionLog>& pool, const SftOptions& options) {
  if (pool.empty()) throw data_error("build_variants: empty pool");
  if (options.histogram_bins < 1) throw data_error("build_variants: histogram_bins must be >= 1");

  SftVariants variants;
  for (const QuestionLog& log : pool) {
    std::vector<const GenerationRecord*> eligible;
    for (const GenerationRecord& g : log.generations) {
      if (!g.usable()) continue;  // truncated thinking is never selected
      if (options.correct_only && !g.correct.value_or(false)) continue;
      eligible.push_back(&g);
    }
    std::sort(eligible.begin(), eligible.end(),
              [](const GenerationRecord* a, const GenerationRecord* b) {
                return a->sample_index < b->sample_index;
              });
    if (options.n_per_prompt > 0 &&
        eligible.size() > static_cast<std::size_t>(options.n_per_prompt))
      eligible.resize(static_cast<std::size_t>(options.n_per_prompt));

    if (eligible.empty()) {
      variants.skipped.push_back(log.question_id);
      continue;
    }

    auto by_length = [](const GenerationRecord* a, const GenerationRecord* b) {
      if (a->think_tokens != b->think_tokens) return a->think_tokens < b->think_tokens;
      return a->sample_index < b->sample_index;
    };
    const GenerationRecord* shortest =
        *std::min_element(eligible.begin(), eligible.end(), by_length);
    const GenerationRecord* longest =
        *std::max_element(eligible.begin(), eligible.end(), by_length);
    Rng rng(mix_seed(options.rng_seed, fnv1a64(log.question_id)));
    const GenerationRecord* random = eligible[rng.uniform_below(eligible.size())];

    variants.shortest.push_back(make_example(log, *shortest));
    variants.longest.push_back(make_example(log, *longest));
    variants.random.push_back(make_example(log, *random));
  }
  return variants;
}

std::vector<HistogramBin> token_histogram(const std::vector<SftExample>& examples, int bins,
                                          double lo, double hi) {
  if (bins < 1) throw data_error("token_histogram: bins must be >= 1");
  if (hi <= lo) hi = lo + 1.0;
  const double width = (hi - lo) / bins;
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    out[b].left = lo + b * width;
    out[b].right = lo + (b + 1) * width;
  }
  for (const SftExample& e : examples) {
    int b = static_cast<int>(std::floor((static_cast<double>(e.think_tokens) - lo) / width));
    b = std::clamp(b, 0, bins - 1);  // last bin's right edge is inclusive
    out[static_cast<std::size_t>(b)].count++;
  }
  return out;
}

std::string variant_to_jsonl(const std::vector<SftExample>& examples) {
  std::ostringstream out;
  for (const SftExample& e : examples) {
    out << '{' << json_string("prompt") << ':' << json_string(e.prompt) << ','
        << json_string("trajectory") << ':' << json_string(e.trajectory) << ','
        << json_string("answer") << ':' << json_string(e.answer) << '}' << '\n';
  }
  return out.str();
}

std::string histogram_to_csv(const std::vector<HistogramBin>& bins) {
  std::ostringstream out;
  out << "bin_left,bin_right,count\n";
  for (const HistogramBin& b : bins)
    out << json_number(b.left) << ',' << json_number(b.right) << ',' << b.count << '\n';
  return out.str();
}

}  // namespace shortmk
