#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shortmk/answers.hpp"
#include "shortmk/metrics.hpp"
#include "shortmk/types.hpp"

namespace shortmk {

struct LoadedLog {
  QuestionLog log;
  std::string source;  // file stem, used as the benchmark group key
};

struct IngestOptions {
  AnswerPolicy policy;
  bool regrade_missing = true;  // grade records lacking `correct` when gold is present
};

// Parses, validates, and (optionally) grades logs. Throws data_error naming
// file and line on schema violations.
std::vector<LoadedLog> ingest(const std::vector<std::string>& paths,
                              const IngestOptions& options = {});

// Expands a glob ('*' and '?' in the filename part) into sorted paths.
std::vector<std::string> expand_glob(const std::string& pattern);

struct CurveGrid {
  std::vector<Method> methods = {Method::MajorityAtK, Method::ShortestMAtK,
                                 Method::OraclePassAtK};
  std::vector<int> k_set = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> m_set = {1, 3};
  TieBreak tie_break = TieBreak::Shortest;
  TieBreak majority_tie_break = TieBreak::Random;
  std::int64_t exact_threshold = 250000;
  int mc_samples = 10000;
  std::uint64_t rng_seed = 0;
  int workers = 0;
};

struct CurveEmission {
  std::string csv;
  std::string json;  // summary mirroring CurvePoint fields
  std::vector<CurvePoint> points;
  std::vector<std::string> warnings;  // dropped questions etc.
};

// One CSV row per (method, k, m), deterministic under a fixed seed.
// Questions whose usable pool is smaller than a k are dropped from that k's
// rows with a warning; a k with zero usable questions is a data error.
CurveEmission emit_curves(const std::vector<LoadedLog>& logs, const CurveGrid& grid);

struct TableOutput {
  std::string text;
  std::string csv;
};

// Difficulty terciles with correct/incorrect/all token means. Groups where a
// category is empty render that mean as "–".
TableOutput emit_table1(const std::vector<LoadedLog>& logs);

// Shortest/longest/random selection per benchmark group (log source), with
// the percent token delta vs the random row, plus an average across groups.
TableOutput emit_table2(const std::vector<LoadedLog>& logs, std::uint64_t rng_seed,
                        bool random_expectation = true);

}  // namespace shortmk
