#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "shortmk/rng.hpp"
#include "shortmk/types.hpp"

namespace testutil {

inline shortmk::GenerationRecord rec(const std::string& qid, int idx, std::int64_t tokens,
                                     std::optional<std::string> answer,
                                     std::optional<bool> correct,
                                     shortmk::Finish finish = shortmk::Finish::ThinkCompleted) {
  shortmk::GenerationRecord g;
  g.question_id = qid;
  g.sample_index = idx;
  g.think_tokens = tokens;
  g.answer_extracted = std::move(answer);
  if (g.answer_extracted) g.answer_raw = "The answer is " + *g.answer_extracted;
  g.correct = correct;
  g.finish = finish;
  return g;
}

inline shortmk::QuestionLog make_log(const std::string& qid,
                                     std::vector<shortmk::GenerationRecord> generations,
                                     const std::string& gold = "") {
  shortmk::QuestionLog log;
  log.question_id = qid;
  log.prompt = "prompt for " + qid;
  log.gold_answer = gold;
  log.model = "fixture";
  log.generations = std::move(generations);
  return log;
}

// Random synthetic question: lengths uniform in [1, 400], answers drawn from a
// small space, correctness = (answer == gold).
inline shortmk::QuestionLog random_log(shortmk::Rng& rng, const std::string& qid, int n,
                                       int answer_space = 4) {
  std::vector<shortmk::GenerationRecord> generations;
  const std::string gold = "0";
  for (int i = 0; i < n; ++i) {
    std::string answer = std::to_string(rng.uniform_below(answer_space));
    auto g = rec(qid, i, 1 + static_cast<std::int64_t>(rng.uniform_below(400)), answer,
                 answer == gold);
    generations.push_back(std::move(g));
  }
  return make_log(qid, std::move(generations), gold);
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    base_ = std::filesystem::temp_directory_path() /
            ("shortmk_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(base_);
    std::filesystem::create_directories(base_);
  }
  ~TempDir() { std::filesystem::remove_all(base_); }

  std::filesystem::path path(const std::string& name) const { return base_ / name; }
  const std::filesystem::path& root() const { return base_; }

 private:
  std::filesystem::path base_;
};

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace testutil
