#include <doctest.h>

#include <cstdlib>
#include <string>

#include "shortmk/jsonl.hpp"
#include "shortmk/mock_server.hpp"
#include "test_util.hpp"

#ifndef SHORTMK_CLI_PATH
#error "SHORTMK_CLI_PATH must point at the built CLI binary"
#endif

using namespace shortmk;
using testutil::TempDir;

namespace {

int run_cli(const std::string& args, const std::filesystem::path& output) {
  std::string command = std::string(SHORTMK_CLI_PATH) + " " + args + " > " + output.string() +
                        " 2>&1";
  int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_fixture_logs(const std::filesystem::path& path, int n_questions, int pool,
                        std::uint64_t seed) {
  Rng rng(seed);
  std::vector<QuestionLog> logs;
  for (int q = 0; q < n_questions; ++q)
    logs.push_back(testutil::random_log(rng, "q" + std::to_string(q), pool));
  write_question_log_file(path.string(), logs);
}

}  // namespace

TEST_CASE("help exits zero") {
  TempDir dir("cli_help");
  CHECK(run_cli("--help", dir.path("out.txt")) == 0);
  CHECK(run_cli("eval --help", dir.path("out2.txt")) == 0);
}

TEST_CASE("unknown flags and bad configs exit with the config code") {
  TempDir dir("cli_cfg");
  CHECK(run_cli("--definitely-not-a-flag", dir.path("o1.txt")) == 2);
  // m > k breaches the run-config invariant.
  CHECK(run_cli("race --k 3 --m 5 --prompt x", dir.path("o2.txt")) == 2);
  CHECK(run_cli("eval --logs nowhere.jsonl --k notanumber --out " +
                    dir.path("c.csv").string(),
                dir.path("o3.txt")) == 2);
}

TEST_CASE("eval produces deterministic bytes and rejects oversized k") {
  TempDir dir("cli_eval");
  write_fixture_logs(dir.path("pool.jsonl"), 4, 10, 42);

  std::string base = "eval --logs " + dir.path("pool.jsonl").string() +
                     " --k 1..6 --m 1,3 --seed 7";
  CHECK(run_cli(base + " --workers 1 --out " + dir.path("a.csv").string(), dir.path("ea.txt")) ==
        0);
  CHECK(run_cli(base + " --workers 1 --out " + dir.path("b.csv").string(), dir.path("eb.txt")) ==
        0);
  CHECK(run_cli(base + " --workers 4 --out " + dir.path("c.csv").string(), dir.path("ec.txt")) ==
        0);
  std::string a = testutil::read_text(dir.path("a.csv"));
  CHECK(!a.empty());
  CHECK(a == testutil::read_text(dir.path("b.csv")));
  CHECK(a == testutil::read_text(dir.path("c.csv")));
  CHECK(testutil::read_text(dir.path("a.json")) == testutil::read_text(dir.path("c.json")));

  // k = 11 exceeds every usable pool: data error.
  CHECK(run_cli("eval --logs " + dir.path("pool.jsonl").string() + " --k 11 --out " +
                    dir.path("d.csv").string(),
                dir.path("ed.txt")) == 4);
  std::string err = testutil::read_text(dir.path("ed.txt"));
  CHECK(err.find("data error") != std::string::npos);
}

TEST_CASE("report renders both tables") {
  TempDir dir("cli_report");
  write_fixture_logs(dir.path("pool.jsonl"), 6, 8, 11);
  CHECK(run_cli("report --logs " + dir.path("pool.jsonl").string() + " --format text",
                dir.path("r.txt")) == 0);
  std::string text = testutil::read_text(dir.path("r.txt"));
  CHECK(text.find("group") != std::string::npos);
  CHECK(text.find("benchmark") != std::string::npos);
  CHECK(text.find("shortest") != std::string::npos);

  CHECK(run_cli("report --logs " + dir.path("pool.jsonl").string() + " --format csv --table 1",
                dir.path("r2.txt")) == 0);
  std::string csv = testutil::read_text(dir.path("r2.txt"));
  CHECK(csv.rfind("group,", 0) == 0);
}

TEST_CASE("build-sft writes variants, histograms, and skip report deterministically") {
  TempDir dir("cli_sft");
  write_fixture_logs(dir.path("pool.jsonl"), 8, 10, 5);
  std::string base = "build-sft --logs " + dir.path("pool.jsonl").string() + " --seed 3 --out ";
  CHECK(run_cli(base + dir.path("v1").string(), dir.path("s1.txt")) == 0);
  CHECK(run_cli(base + dir.path("v2").string(), dir.path("s2.txt")) == 0);
  for (const char* name : {"short.jsonl", "long.jsonl", "random.jsonl", "hist_short.csv",
                           "hist_long.csv", "hist_random.csv", "skipped.txt"}) {
    CAPTURE(name);
    CHECK(testutil::read_text(dir.path("v1") / name) == testutil::read_text(dir.path("v2") / name));
  }
  CHECK(!testutil::read_text(dir.path("v1") / "short.jsonl").empty());
}

TEST_CASE("race subcommand runs against the mock and logs the outcome") {
  MockScenario scenario;
  scenario.tick_ms = 25;
  scenario.stagger_ms = 8;
  scenario.pause_on_close_ms = 400;
  scenario.streams = {
      {3, "The answer is 11", std::nullopt, false, false, 0, std::nullopt},
      {6, "The answer is 22", std::nullopt, false, false, 0, std::nullopt},
      {9, "The answer is 33", std::nullopt, false, false, 0, std::nullopt},
  };
  MockServer server(std::move(scenario));
  server.start();

  TempDir dir("cli_race");
  testutil::write_text(dir.path("run.cfg"), "endpoint_url = \"" + server.base_url() + "\"\n" +
                                                "model_name = \"mock\"\napi_key_env = \"\"\n");
  int code = run_cli("race --config " + dir.path("run.cfg").string() +
                         " --k 3 --m 1 --prompt \"what?\" --log " + dir.path("race.jsonl").string(),
                     dir.path("race_out.txt"));
  server.stop();
  CHECK(code == 0);
  std::string out = testutil::read_text(dir.path("race_out.txt"));
  CHECK(out.find("answer=11") != std::string::npos);

  auto logs = read_question_log_file(dir.path("race.jsonl").string());
  REQUIRE(logs.size() == 1);
  CHECK(logs[0].generations.size() == 3);
}
