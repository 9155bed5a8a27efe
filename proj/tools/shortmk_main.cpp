#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>

#include "shortmk/answers.hpp"
#include "shortmk/jsonl.hpp"
#include "shortmk/metrics.hpp"
#include "shortmk/orchestrator.hpp"
#include "shortmk/replay.hpp"
#include "shortmk/sft.hpp"
#include "shortmk/types.hpp"

namespace fs = std::filesystem;
using namespace shortmk;

namespace {

// Exit codes: 0 success, 2 config/usage, 3 transport, 4 data.
constexpr int kExitConfig = 2;
constexpr int kExitTransport = 3;
constexpr int kExitData = 4;

std::vector<int> parse_int_set(const std::string& spec, const char* what) {
  std::vector<int> values;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t comma = spec.find(',', pos);
    std::string item = spec.substr(pos, comma == std::string::npos ? std::string::npos
                                                                   : comma - pos);
    std::size_t dots = item.find("..");
    try {
      if (dots != std::string::npos) {
        int lo = std::stoi(item.substr(0, dots));
        int hi = std::stoi(item.substr(dots + 2));
        if (hi < lo) throw std::invalid_argument("range");
        for (int v = lo; v <= hi; ++v) values.push_back(v);
      } else {
        values.push_back(std::stoi(item));
      }
    } catch (const std::exception&) {
      throw config_error(std::string("cannot parse ") + what + " specification '" + spec +
                         "' (use e.g. \"1..10\" or \"1,3\")");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (values.empty()) throw config_error(std::string("empty ") + what + " specification");
  return values;
}

std::vector<Method> parse_methods(const std::string& spec) {
  std::vector<Method> methods;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t comma = spec.find(',', pos);
    std::string item = spec.substr(pos, comma == std::string::npos ? std::string::npos
                                                                   : comma - pos);
    if (item == "all") {
      return {Method::MajorityAtK, Method::ShortestMAtK, Method::OraclePassAtK};
    }
    auto m = method_from_string(item);
    if (!m) throw config_error("unknown method '" + item + "'");
    methods.push_back(*m);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (methods.empty()) throw config_error("empty methods list");
  return methods;
}

// Flat key=value run configuration with the precedence
// flag > config file > built-in default.
struct RunConfigCli {
  RunConfig config;
  std::string tie_break_name = "shortest";
  std::string count_unit_name = "chunks";
  std::string config_path;

  struct Entry {
    CLI::Option* option = nullptr;
    std::function<void(const std::string&)> set;
  };
  std::map<std::string, Entry> entries;

  template <typename T>
  void bind(CLI::App* cmd, const std::string& names, T& target, const std::string& help = "") {
    std::string key = names.substr(2, names.find(',') == std::string::npos
                                          ? std::string::npos
                                          : names.find(',') - 2);
    Entry entry;
    entry.option = cmd->add_option(names, target, help);
    entry.set = [&target, key](const std::string& raw) {
      if constexpr (std::is_same_v<T, std::string>) {
        target = raw;
      } else if constexpr (std::is_same_v<T, double>) {
        target = std::stod(raw);
      } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        target = std::stoull(raw);
      } else {
        target = static_cast<T>(std::stoll(raw));
      }
    };
    entries[key] = std::move(entry);
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration file (key = value lines)");
    bind(cmd, "--endpoint_url,--endpoint-url", config.endpoint_url,
         "OpenAI-compatible API base, e.g. http://host:port/v1");
    bind(cmd, "--model_name,--model", config.model_name, "model identifier");
    bind(cmd, "--temperature", config.temperature);
    bind(cmd, "--top_p", config.top_p);
    bind(cmd, "--max_tokens", config.max_tokens);
    bind(cmd, "--think_open", config.think_open, "thinking-phase open marker");
    bind(cmd, "--think_close", config.think_close, "thinking-phase close marker");
    bind(cmd, "--k", config.k, "parallel generations per question");
    bind(cmd, "--m", config.m, "thinking completions that end the race");
    bind(cmd, "--tie_break,--tie-break", tie_break_name, "shortest|random|longest");
    bind(cmd, "--rng_seed,--seed", config.rng_seed);
    bind(cmd, "--api_key_env", config.api_key_env,
         "environment variable holding the API credential");
    bind(cmd, "--count_unit", count_unit_name, "chunks|whitespace");
    bind(cmd, "--retry_budget", config.retry_budget);
    bind(cmd, "--connect_timeout_s", config.connect_timeout_s);
    bind(cmd, "--read_timeout_s", config.read_timeout_s);
  }

  void apply_config_file() {
    if (config_path.empty()) return;
    std::ifstream in(config_path);
    if (!in) throw config_error("cannot open config file: " + config_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string_view view(line);
      auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
          s.remove_suffix(1);
        return s;
      };
      view = trim(view);
      if (view.empty() || view.front() == '#') continue;
      std::size_t eq = view.find('=');
      if (eq == std::string_view::npos)
        throw config_error(config_path + ":" + std::to_string(line_no) +
                           ": expected key = value");
      std::string key(trim(view.substr(0, eq)));
      std::string_view value = trim(view.substr(eq + 1));
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
        value = value.substr(1, value.size() - 2);
      auto it = entries.find(key);
      if (it == entries.end())
        throw config_error(config_path + ":" + std::to_string(line_no) +
                           ": unknown config key '" + key + "'");
      if (it->second.option->count() > 0) continue;  // the flag wins
      try {
        it->second.set(std::string(value));
      } catch (const std::exception&) {
        throw config_error(config_path + ":" + std::to_string(line_no) + ": bad value for '" +
                           key + "'");
      }
    }
  }

  RunConfig finalize() {
    apply_config_file();
    auto tb = tie_break_from_string(tie_break_name);
    if (!tb) throw config_error("unknown tie_break '" + tie_break_name + "'");
    config.tie_break = *tb;
    auto unit = token_unit_from_string(count_unit_name);
    if (!unit) throw config_error("unknown count_unit '" + count_unit_name + "'");
    config.count_unit = *unit;
    config.validate();
    return config;
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write file: " + path);
  out << content;
}

std::vector<std::string> expand_log_args(const std::vector<std::string>& patterns) {
  std::vector<std::string> paths;
  for (const std::string& pattern : patterns) {
    std::vector<std::string> expanded = expand_glob(pattern);
    paths.insert(paths.end(), expanded.begin(), expanded.end());
  }
  return paths;
}

int cmd_generate(const RunConfig& config, const std::string& prompts_path, int n,
                 const std::string& out_dir) {
  std::vector<PromptSpec> prompts = read_prompts_file(prompts_path);
  fs::create_directories(out_dir);
  AnswerPolicy policy;
  int written = 0;
  for (const PromptSpec& prompt : prompts) {
    std::vector<QuestionLog> logs = generate_pool(config, {&prompt, 1}, n, policy);
    fs::path path = fs::path(out_dir) / (prompt.question_id + ".jsonl");
    write_question_log_file(path.string(), logs);
    ++written;
    std::cout << prompt.question_id << ": " << logs.front().usable_count() << "/" << n
              << " completed -> " << path.string() << std::endl;
  }
  std::cout << "wrote " << written << " log file(s) to " << out_dir << std::endl;
  return 0;
}

int cmd_race(const RunConfig& config, const std::vector<std::string>& prompt_texts,
             const std::string& prompts_path, const std::string& log_path) {
  std::vector<PromptSpec> prompts;
  for (std::size_t i = 0; i < prompt_texts.size(); ++i)
    prompts.push_back({"prompt" + std::to_string(i), prompt_texts[i], ""});
  if (!prompts_path.empty()) {
    std::vector<PromptSpec> from_file = read_prompts_file(prompts_path);
    prompts.insert(prompts.end(), from_file.begin(), from_file.end());
  }
  if (prompts.empty()) throw config_error("race needs --prompt or --prompts");

  std::ofstream log_out;
  if (!log_path.empty()) {
    log_out.open(log_path, std::ios::binary | std::ios::app);
    if (!log_out) throw data_error("cannot open log file: " + log_path);
  }

  for (const PromptSpec& prompt : prompts) {
    RaceResult result = race_question(config, prompt);
    std::cout << prompt.question_id << ": answer="
              << (result.chosen_answer ? *result.chosen_answer : "<none>")
              << " finishers=" << result.finishers
              << (result.degraded ? " degraded" : "") << std::endl;
    if (log_out.is_open()) write_question_log(log_out, result.log);
  }
  return 0;
}

int cmd_eval(const std::vector<std::string>& log_patterns, const CurveGrid& grid,
             const std::string& out_path) {
  std::vector<LoadedLog> logs = ingest(expand_log_args(log_patterns));
  CurveEmission emission = emit_curves(logs, grid);
  for (const std::string& warning : emission.warnings)
    std::cerr << "warning: " << warning << std::endl;
  write_file(out_path, emission.csv);
  fs::path json_path = fs::path(out_path).replace_extension(".json");
  write_file(json_path.string(), emission.json);
  std::cout << "wrote " << emission.points.size() << " curve rows to " << out_path << " and "
            << json_path.string() << std::endl;
  return 0;
}

int cmd_report(const std::vector<std::string>& log_patterns, std::uint64_t seed,
               const std::string& format, const std::string& table, bool random_draw,
               const std::string& out_path) {
  if (format != "text" && format != "csv")
    throw config_error("unknown --format '" + format + "' (use text or csv)");
  if (table != "1" && table != "2" && table != "both")
    throw config_error("unknown --table '" + table + "' (use 1, 2, or both)");

  std::vector<LoadedLog> logs = ingest(expand_log_args(log_patterns));
  std::string output;
  if (table == "1" || table == "both") {
    TableOutput t1 = emit_table1(logs);
    output += format == "text" ? t1.text : t1.csv;
  }
  if (table == "both") output += "\n";
  if (table == "2" || table == "both") {
    TableOutput t2 = emit_table2(logs, seed, !random_draw);
    output += format == "text" ? t2.text : t2.csv;
  }
  std::cout << output;
  if (!out_path.empty()) write_file(out_path, output);
  return 0;
}

int cmd_build_sft(const std::vector<std::string>& log_patterns, const SftOptions& options,
                  const std::string& out_dir) {
  std::vector<LoadedLog> loaded = ingest(expand_log_args(log_patterns));
  std::vector<QuestionLog> pool;
  pool.reserve(loaded.size());
  for (LoadedLog& entry : loaded) pool.push_back(std::move(entry.log));

  SftVariants variants = build_variants(pool, options);
  fs::create_directories(out_dir);

  double hi = 1.0;
  for (const auto* v : {&variants.shortest, &variants.longest, &variants.random})
    for (const SftExample& e : *v) hi = std::max(hi, static_cast<double>(e.think_tokens));

  struct Named {
    const char* name;
    const std::vector<SftExample>* examples;
  };
  for (const Named& v : {Named{"short", &variants.shortest}, Named{"long", &variants.longest},
                         Named{"random", &variants.random}}) {
    fs::path data_path = fs::path(out_dir) / (std::string(v.name) + ".jsonl");
    write_file(data_path.string(), variant_to_jsonl(*v.examples));
    fs::path hist_path = fs::path(out_dir) / ("hist_" + std::string(v.name) + ".csv");
    write_file(hist_path.string(),
               histogram_to_csv(token_histogram(*v.examples, options.histogram_bins, 0.0, hi)));
  }
  std::string skip_report;
  for (const std::string& qid : variants.skipped) skip_report += qid + "\n";
  write_file((fs::path(out_dir) / "skipped.txt").string(), skip_report);

  std::cout << "built " << variants.shortest.size() << " example(s) per variant in " << out_dir;
  if (!variants.skipped.empty())
    std::cout << " (" << variants.skipped.size() << " prompt(s) skipped)";
  std::cout << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shortest-m@k inference racer and replay evaluator"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "sample a replay pool from an endpoint");
  RunConfigCli gen_cfg;
  gen_cfg.attach(generate);
  std::string gen_prompts, gen_out;
  int gen_n = 20;
  bool gen_think_text = true;
  generate->add_option("--prompts", gen_prompts, "prompts JSONL file")->required();
  generate->add_option("--n", gen_n, "samples per prompt");
  generate->add_option("--out", gen_out, "output directory")->required();
  generate->add_flag("--log-think-text,!--no-log-think-text", gen_think_text,
                     "record thinking text for dataset building");

  // race
  auto* race = app.add_subcommand("race", "live shortest-m@k over one or more prompts");
  RunConfigCli race_cfg;
  race_cfg.attach(race);
  std::vector<std::string> race_prompts;
  std::string race_prompts_file, race_log;
  race->add_option("--prompt", race_prompts, "inline prompt text (repeatable)");
  race->add_option("--prompts", race_prompts_file, "prompts JSONL file");
  race->add_option("--log", race_log, "append the full question log here");

  // eval
  auto* eval = app.add_subcommand("eval", "replay logs into curve data");
  std::vector<std::string> eval_logs;
  std::string eval_k = "1..10", eval_m = "1,3", eval_methods = "all", eval_out;
  std::string eval_tie = "shortest", eval_maj_tie = "random";
  CurveGrid grid;
  eval->add_option("--logs", eval_logs, "log files or globs")->required();
  eval->add_option("--k", eval_k, "k grid, e.g. 1..10 or 2,4,8");
  eval->add_option("--m", eval_m, "m grid for shortest-m, e.g. 1,3");
  eval->add_option("--methods", eval_methods, "all or a comma list of majority,shortest_m,oracle");
  eval->add_option("--seed", grid.rng_seed);
  eval->add_option("--exact-threshold,--exact_threshold", grid.exact_threshold,
                   "max subsets enumerated exactly");
  eval->add_option("--mc-samples,--mc_samples", grid.mc_samples);
  eval->add_option("--workers", grid.workers, "0 = hardware concurrency");
  eval->add_option("--tie-break,--tie_break", eval_tie, "shortest-m vote tie break");
  eval->add_option("--majority-tie-break,--majority_tie_break", eval_maj_tie,
                   "baseline vote tie break");
  eval->add_option("--out", eval_out, "curve CSV path (JSON summary written alongside)")
      ->required();

  // report
  auto* report = app.add_subcommand("report", "difficulty terciles and selection tables");
  std::vector<std::string> report_logs;
  std::uint64_t report_seed = 0;
  std::string report_format = "text", report_table = "both", report_out;
  bool report_random_draw = false;
  report->add_option("--logs", report_logs, "log files or globs")->required();
  report->add_option("--seed", report_seed);
  report->add_option("--format", report_format, "text|csv");
  report->add_option("--table", report_table, "1|2|both");
  report->add_flag("--random-draw", report_random_draw,
                   "single seeded draw per question instead of the exact expectation");
  report->add_option("--out", report_out, "also write the report here");

  // build-sft
  auto* build_sft = app.add_subcommand("build-sft", "select short/long/random training variants");
  std::vector<std::string> sft_logs;
  SftOptions sft_options;
  std::string sft_out;
  build_sft->add_option("--logs", sft_logs, "log files or globs")->required();
  build_sft->add_option("--seed", sft_options.rng_seed);
  build_sft->add_option("--out", sft_out, "output directory")->required();
  build_sft->add_option("--n-per-prompt", sft_options.n_per_prompt,
                        "consider only the first n usable generations (0 = all)");
  build_sft->add_flag("--correct-only", sft_options.correct_only);
  build_sft->add_option("--bins", sft_options.histogram_bins, "histogram bin count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (generate->parsed())
      return cmd_generate([&] {
        RunConfig c = gen_cfg.finalize();
        c.log_think_text = gen_think_text;
        return c;
      }(), gen_prompts, gen_n, gen_out);
    if (race->parsed())
      return cmd_race(race_cfg.finalize(), race_prompts, race_prompts_file, race_log);
    if (eval->parsed()) {
      grid.k_set = parse_int_set(eval_k, "k");
      grid.m_set = parse_int_set(eval_m, "m");
      grid.methods = parse_methods(eval_methods);
      auto tb = tie_break_from_string(eval_tie);
      auto mtb = tie_break_from_string(eval_maj_tie);
      if (!tb || !mtb) throw config_error("unknown tie break policy");
      grid.tie_break = *tb;
      grid.majority_tie_break = *mtb;
      return cmd_eval(eval_logs, grid, eval_out);
    }
    if (report->parsed())
      return cmd_report(report_logs, report_seed, report_format, report_table,
                        report_random_draw, report_out);
    if (build_sft->parsed()) return cmd_build_sft(sft_logs, sft_options, sft_out);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kExitConfig;
  } catch (const transport_error& e) {
    std::cerr << "transport error: " << e.what() << std::endl;
    return kExitTransport;
  } catch (const data_error& e) {
    std::cerr << "data error: " << e.what() << std::endl;
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
