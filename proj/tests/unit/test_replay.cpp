#include <doctest.h>

#include <fstream>
#include <sstream>

#include "shortmk/jsonl.hpp"
#include "shortmk/replay.hpp"
#include "test_util.hpp"

using namespace shortmk;
using testutil::make_log;
using testutil::rec;
using testutil::TempDir;

namespace {

void write_log_file(const std::filesystem::path& path, const std::vector<QuestionLog>& logs) {
  write_question_log_file(path.string(), logs);
}

std::vector<QuestionLog> fixture_questions(int n_questions, int pool, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<QuestionLog> logs;
  for (int q = 0; q < n_questions; ++q)
    logs.push_back(testutil::random_log(rng, "q" + std::to_string(q), pool));
  return logs;
}

}  // namespace

TEST_CASE("ingest reads, validates, and grades") {
  TempDir dir("ingest");
  for (int f = 0; f < 3; ++f) {
    QuestionLog log = make_log("q" + std::to_string(f),
                               {rec("q" + std::to_string(f), 0, 4, "7", true),
                                rec("q" + std::to_string(f), 1, 9, "3", false)},
                               "7");
    write_log_file(dir.path("file" + std::to_string(f) + ".jsonl"), {log});
  }
  auto loaded = ingest({dir.path("file0.jsonl").string(), dir.path("file1.jsonl").string(),
                        dir.path("file2.jsonl").string()});
  CHECK(loaded.size() == 3);
  CHECK(loaded[0].source == "file0");

  // A truncated record stays in the log but shrinks the usable pool.
  std::vector<GenerationRecord> gens;
  for (int i = 0; i < 20; ++i) gens.push_back(rec("qt", i, 10 + i, "7", true));
  gens[19] = rec("qt", 19, 500, std::nullopt, std::nullopt, Finish::ThinkTruncated);
  write_log_file(dir.path("trunc.jsonl"), {make_log("qt", gens, "7")});
  auto truncated = ingest({dir.path("trunc.jsonl").string()});
  CHECK(truncated[0].log.generations.size() == 20);
  CHECK(truncated[0].log.usable_count() == 19);

  // Ungraded records get graded from the gold answer on ingest.
  QuestionLog ungraded = make_log("qg", {}, "42");
  GenerationRecord g = rec("qg", 0, 5, std::nullopt, std::nullopt);
  g.answer_raw = "The answer is \\boxed{042}";
  ungraded.generations.push_back(g);
  write_log_file(dir.path("ungraded.jsonl"), {ungraded});
  auto graded = ingest({dir.path("ungraded.jsonl").string()});
  CHECK(graded[0].log.generations[0].answer_extracted == "42");
  CHECK(graded[0].log.generations[0].correct == true);
}

TEST_CASE("ingest names the offending line") {
  TempDir dir("badline");
  std::ostringstream content;
  QuestionLog log = make_log("q", {}, "7");
  content << serialize_header(log) << '\n';
  for (int i = 0; i < 5; ++i) content << serialize_record(rec("q", i, 3, "7", true)) << '\n';
  content << "{\"this is\": \"not a record\"}\n";
  testutil::write_text(dir.path("bad.jsonl"), content.str());
  CHECK_THROWS_WITH_AS(ingest({dir.path("bad.jsonl").string()}), doctest::Contains(":7"),
                       data_error);

  testutil::write_text(dir.path("norecord.jsonl"),
                       serialize_record(rec("q", 0, 3, "7", true)) + "\n");
  CHECK_THROWS_WITH_AS(ingest({dir.path("norecord.jsonl").string()}),
                       doctest::Contains("header"), data_error);
}

TEST_CASE("expand_glob") {
  TempDir dir("glob");
  testutil::write_text(dir.path("a1.jsonl"), "");
  testutil::write_text(dir.path("a2.jsonl"), "");
  testutil::write_text(dir.path("b.txt"), "");
  auto matches = expand_glob((dir.root() / "a*.jsonl").string());
  CHECK(matches.size() == 2);
  CHECK_THROWS_AS(expand_glob((dir.root() / "z*.jsonl").string()), data_error);
  CHECK(expand_glob(dir.path("b.txt").string()).size() == 1);
  CHECK_THROWS_AS(expand_glob(dir.path("missing.txt").string()), data_error);
}

TEST_CASE("emit_curves row grid and header") {
  std::vector<LoadedLog> logs;
  for (QuestionLog& log : fixture_questions(2, 10, 5)) logs.push_back({log, "bench"});

  CurveGrid grid;
  grid.k_set = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  grid.m_set = {1, 3};
  grid.workers = 2;
  CurveEmission emission = emit_curves(logs, grid);
  CHECK(emission.points.size() == 40);  // 10k x (majority + 2 shortest + oracle)

  std::istringstream csv(emission.csv);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "method,k,m,accuracy,compute_mean,time_mean,enumeration");
  int rows = 0;
  std::string line;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 40);
  CHECK(emission.csv.find("\r") == std::string::npos);  // LF endings only

  // k=1: majority and shortest-1 coincide.
  auto find_acc = [&](Method method, int k, std::optional<int> m) {
    for (const CurvePoint& pt : emission.points)
      if (pt.method == method && pt.k == k && pt.m == m) return pt.accuracy_mean;
    FAIL("row not found");
    return 0.0;
  };
  CHECK(find_acc(Method::MajorityAtK, 1, std::nullopt) ==
        doctest::Approx(find_acc(Method::ShortestMAtK, 1, 1)).epsilon(1e-12));

  // Oracle accuracy dominates everything at equal k; shortest-m costs at most
  // the majority budget.
  for (int k : grid.k_set) {
    double oracle_acc = find_acc(Method::OraclePassAtK, k, std::nullopt);
    for (int m : grid.m_set)
      CHECK(oracle_acc >= find_acc(Method::ShortestMAtK, k, m) - 1e-12);
    CHECK(oracle_acc >= find_acc(Method::MajorityAtK, k, std::nullopt) - 1e-12);
  }
}

TEST_CASE("emit_curves drops undersized questions with a warning") {
  std::vector<LoadedLog> logs;
  QuestionLog small = make_log("small", {rec("small", 0, 5, "1", true),
                                         rec("small", 1, 6, "1", true),
                                         rec("small", 2, 7, "1", true)});
  QuestionLog big = make_log("big", {});
  for (int i = 0; i < 6; ++i) big.generations.push_back(rec("big", i, 10 + i, "1", true));
  logs.push_back({small, "a"});
  logs.push_back({big, "a"});

  CurveGrid grid;
  grid.k_set = {5};
  grid.m_set = {1};
  grid.workers = 1;
  CurveEmission emission = emit_curves(logs, grid);
  REQUIRE(!emission.warnings.empty());
  CHECK(emission.warnings[0].find("small") != std::string::npos);
  CHECK(emission.points[0].n_questions == 1);

  grid.k_set = {7};
  CHECK_THROWS_AS(emit_curves(logs, grid), data_error);
}

TEST_CASE("emit_curves deterministic bytes across runs and workers") {
  std::vector<LoadedLog> logs;
  for (QuestionLog& log : fixture_questions(5, 9, 77)) logs.push_back({log, "bench"});
  CurveGrid grid;
  grid.k_set = {2, 4};
  grid.m_set = {1, 2};
  grid.exact_threshold = 20;  // C(9,4) = 126 goes Monte Carlo
  grid.mc_samples = 400;
  grid.rng_seed = 99;

  grid.workers = 1;
  std::string a = emit_curves(logs, grid).csv;
  std::string a_json = emit_curves(logs, grid).json;
  grid.workers = 4;
  CurveEmission b = emit_curves(logs, grid);
  CHECK(a == b.csv);
  CHECK(a_json == b.json);
  CHECK(a.find("mc:400") != std::string::npos);
}

TEST_CASE("emit_table1 renders the en dash for empty categories") {
  std::vector<LoadedLog> logs;
  // Three questions, the easiest answered perfectly.
  QuestionLog easy = make_log("easy1", {rec("easy1", 0, 8, "G", true), rec("easy1", 1, 9, "G", true)},
                              "G");
  QuestionLog mid = make_log("mid1", {rec("mid1", 0, 11, "G", true), rec("mid1", 1, 12, "X", false)},
                             "G");
  QuestionLog hard =
      make_log("hard1", {rec("hard1", 0, 21, "X", false), rec("hard1", 1, 22, "Y", false)}, "G");
  logs.push_back({easy, "b"});
  logs.push_back({mid, "b"});
  logs.push_back({hard, "b"});

  TableOutput table = emit_table1(logs);
  CHECK(table.text.find("–") != std::string::npos);
  CHECK(table.csv.find("easy,1,") != std::string::npos);
  // easy row: correct mean 8.5, incorrect absent.
  CHECK(table.csv.find("easy,1,1,8.5,,8.5") != std::string::npos);

  std::vector<LoadedLog> single = {{easy, "b"}};
  CHECK_THROWS_AS(emit_table1(single), data_error);
}

TEST_CASE("emit_table2 prints percent deltas per benchmark") {
  std::vector<LoadedLog> logs;
  QuestionLog designed =
      make_log("d", {rec("d", 0, 58, "G", true), rec("d", 1, 142, "X", false)}, "G");
  logs.push_back({designed, "bench_a"});
  TableOutput table = emit_table2(logs, 0);
  CHECK(table.text.find("(-42%)") != std::string::npos);
  CHECK(table.text.find("(+42%)") != std::string::npos);
  CHECK(table.csv.find("bench_a,shortest,58,1,-42") != std::string::npos);

  // Two benchmarks produce an average block.
  QuestionLog other = make_log("e", {rec("e", 0, 10, "G", true), rec("e", 1, 30, "X", false)}, "G");
  logs.push_back({other, "bench_b"});
  TableOutput multi = emit_table2(logs, 0);
  CHECK(multi.text.find("average") != std::string::npos);
}
