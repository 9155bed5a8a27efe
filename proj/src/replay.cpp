#include "shortmk/replay.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include <json.hpp>

#include "shortmk/jsonl.hpp"

namespace shortmk {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

bool glob_match(std::string_view pattern, std::string_view name) {
  std::size_t p = 0, n = 0, star = std::string_view::npos, backtrack = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      backtrack = n;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      n = ++backtrack;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::string fmt1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

}  // namespace

std::vector<std::string> expand_glob(const std::string& pattern) {
  fs::path p(pattern);
  std::string filename = p.filename().string();
  if (filename.find('*') == std::string::npos && filename.find('?') == std::string::npos) {
    if (!fs::exists(p)) throw data_error("log file not found: " + pattern);
    return {pattern};
  }
  fs::path dir = p.parent_path();
  if (dir.empty()) dir = ".";
  if (!fs::is_directory(dir)) throw data_error("log directory not found: " + dir.string());
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (glob_match(filename, entry.path().filename().string()))
      paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw data_error("glob matched no files: " + pattern);
  return paths;
}

std::vector<LoadedLog> ingest(const std::vector<std::string>& paths,
                              const IngestOptions& options) {
  options.policy.validate();
  std::vector<LoadedLog> loaded;
  for (const std::string& path : paths) {
    std::vector<QuestionLog> logs = read_question_log_file(path);
    if (logs.empty()) throw data_error(path + ": no question blocks found");
    for (QuestionLog& log : logs) {
      std::vector<std::string> violations = validate_log(log);
      if (!violations.empty())
        throw data_error(path + ": invalid log for question '" + log.question_id +
                         "': " + violations.front());
      if (options.regrade_missing && !log.gold_answer.empty()) {
        for (GenerationRecord& g : log.generations) {
          if (!g.usable() || g.correct.has_value()) continue;
          if (!g.answer_extracted)
            g.answer_extracted = extract_answer(g.answer_raw, options.policy);
          g.correct = grade(g.answer_extracted, log.gold_answer, options.policy);
        }
      }
      LoadedLog entry;
      entry.log = std::move(log);
      entry.source = fs::path(path).stem().string();
      loaded.push_back(std::move(entry));
    }
  }
  return loaded;
}

CurveEmission emit_curves(const std::vector<LoadedLog>& logs, const CurveGrid& grid) {
  if (logs.empty()) throw data_error("emit_curves: no logs to evaluate");
  if (grid.k_set.empty()) throw data_error("emit_curves: empty k grid");

  CurveEmission out;
  // (method, k, m) -> point; evaluated one k at a time so each k keeps every
  // question whose pool covers it.
  std::map<std::tuple<int, int, int>, CurvePoint> by_cell;
  for (int k : grid.k_set) {
    std::vector<QuestionLog> usable;
    for (const LoadedLog& entry : logs) {
      if (entry.log.usable_count() >= k) {
        usable.push_back(entry.log);
      } else {
        out.warnings.push_back("question '" + entry.log.question_id + "' dropped for k=" +
                               std::to_string(k) + " (usable pool " +
                               std::to_string(entry.log.usable_count()) + ")");
      }
    }
    if (usable.empty())
      throw data_error("no question has a usable pool of at least k=" + std::to_string(k));

    CurveRequest request;
    request.methods = grid.methods;
    request.k_set = {k};
    request.m_set = grid.m_set;
    request.tie_break = grid.tie_break;
    request.majority_tie_break = grid.majority_tie_break;
    request.exact_threshold = grid.exact_threshold;
    request.mc_samples = grid.mc_samples;
    request.rng_seed = grid.rng_seed;
    request.workers = grid.workers;
    for (CurvePoint& pt : evaluate_curves(usable, request))
      by_cell[{static_cast<int>(pt.method), pt.k, pt.m.value_or(-1)}] = std::move(pt);
  }

  for (Method method : grid.methods) {
    for (int k : grid.k_set) {
      if (method == Method::ShortestMAtK) {
        for (int m : grid.m_set)
          out.points.push_back(by_cell.at({static_cast<int>(method), k, m}));
      } else {
        out.points.push_back(by_cell.at({static_cast<int>(method), k, -1}));
      }
    }
  }

  std::ostringstream csv;
  csv << "method,k,m,accuracy,compute_mean,time_mean,enumeration\n";
  ordered_json summary;
  summary["rng_seed"] = grid.rng_seed;
  summary["points"] = ordered_json::array();
  for (const CurvePoint& pt : out.points) {
    csv << to_string(pt.method) << ',' << pt.k << ',';
    if (pt.m) csv << *pt.m;
    csv << ',' << json_number(pt.accuracy_mean) << ',' << json_number(pt.compute_mean) << ','
        << json_number(pt.time_mean) << ',' << pt.enumeration.label() << '\n';

    ordered_json j;
    j["method"] = std::string(to_string(pt.method));
    j["k"] = pt.k;
    if (pt.m)
      j["m"] = *pt.m;
    else
      j["m"] = nullptr;
    j["accuracy_mean"] = pt.accuracy_mean;
    j["compute_mean"] = pt.compute_mean;
    j["time_mean"] = pt.time_mean;
    j["n_questions"] = pt.n_questions;
    j["enumeration"] = pt.enumeration.label();
    summary["points"].push_back(std::move(j));
  }
  out.csv = csv.str();
  out.json = summary.dump(2) + "\n";
  return out;
}

TableOutput emit_table1(const std::vector<LoadedLog>& logs) {
  std::vector<QuestionLog> questions;
  questions.reserve(logs.size());
  for (const LoadedLog& entry : logs) questions.push_back(entry.log);
  TercileReport report = difficulty_terciles(questions);

  // The en dash marks categories with no records, as in the source table.
  auto cell = [](const std::optional<double>& v) { return v ? fmt1(*v) : std::string("–"); };

  std::ostringstream text;
  text << "group   questions  success  correct  incorrect  all\n";
  std::ostringstream csv;
  csv << "group,questions,success_rate,correct_mean_tokens,incorrect_mean_tokens,all_mean_tokens\n";
  for (const TercileGroup& g : report.groups) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-7s %-10zu %-8s %-8s %-10s %s\n", g.name.c_str(),
                  g.question_ids.size(), fmt1(g.success_rate * 100).c_str(),
                  cell(g.correct_mean).c_str(), cell(g.incorrect_mean).c_str(),
                  fmt1(g.all_mean).c_str());
    text << line;
    csv << g.name << ',' << g.question_ids.size() << ',' << json_number(g.success_rate) << ','
        << (g.correct_mean ? json_number(*g.correct_mean) : "") << ','
        << (g.incorrect_mean ? json_number(*g.incorrect_mean) : "") << ','
        << json_number(g.all_mean) << '\n';
  }
  return {text.str(), csv.str()};
}

TableOutput emit_table2(const std::vector<LoadedLog>& logs, std::uint64_t rng_seed,
                        bool random_expectation) {
  if (logs.empty()) throw data_error("emit_table2: no logs to report");

  std::vector<std::string> group_order;
  std::map<std::string, std::vector<QuestionLog>> groups;
  for (const LoadedLog& entry : logs) {
    auto [it, inserted] = groups.try_emplace(entry.source);
    if (inserted) group_order.push_back(entry.source);
    it->second.push_back(entry.log);
  }
  std::sort(group_order.begin(), group_order.end());

  struct NamedReport {
    std::string name;
    SelectionReport report;
  };
  std::vector<NamedReport> reports;
  for (const std::string& name : group_order)
    reports.push_back({name, short_long_random_report(groups[name], rng_seed, random_expectation)});

  if (reports.size() > 1) {
    SelectionReport avg;
    avg.expectation_mode = random_expectation;
    for (const NamedReport& r : reports) {
      avg.shortest.mean_tokens += r.report.shortest.mean_tokens;
      avg.shortest.mean_accuracy += r.report.shortest.mean_accuracy;
      avg.longest.mean_tokens += r.report.longest.mean_tokens;
      avg.longest.mean_accuracy += r.report.longest.mean_accuracy;
      avg.random.mean_tokens += r.report.random.mean_tokens;
      avg.random.mean_accuracy += r.report.random.mean_accuracy;
      avg.n_questions += r.report.n_questions;
    }
    const double g = static_cast<double>(reports.size());
    avg.shortest.mean_tokens /= g;
    avg.shortest.mean_accuracy /= g;
    avg.longest.mean_tokens /= g;
    avg.longest.mean_accuracy /= g;
    avg.random.mean_tokens /= g;
    avg.random.mean_accuracy /= g;
    auto delta = [&](double tokens) {
      if (avg.random.mean_tokens == 0.0) return 0;
      return static_cast<int>(
          std::llround(100.0 * (tokens - avg.random.mean_tokens) / avg.random.mean_tokens));
    };
    avg.delta_shortest_pct = delta(avg.shortest.mean_tokens);
    avg.delta_longest_pct = delta(avg.longest.mean_tokens);
    reports.push_back({"average", avg});
  }

  std::ostringstream text;
  text << "benchmark    selection  think_tokens  accuracy  delta_vs_random\n";
  std::ostringstream csv;
  csv << "benchmark,selection,think_tokens_mean,accuracy,delta_tokens_pct\n";
  for (const NamedReport& r : reports) {
    struct Row {
      const char* name;
      const SelectionRow* row;
      std::optional<int> delta;
    };
    const Row rows[3] = {
        {"random", &r.report.random, std::nullopt},
        {"longest", &r.report.longest, r.report.delta_longest_pct},
        {"shortest", &r.report.shortest, r.report.delta_shortest_pct},
    };
    for (const Row& row : rows) {
      std::string delta_txt;
      if (row.delta) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "(%+d%%)", *row.delta);
        delta_txt = buf;
      }
      char line[200];
      std::snprintf(line, sizeof(line), "%-12s %-10s %-13s %-9s %s\n", r.name.c_str(), row.name,
                    fmt1(row.row->mean_tokens).c_str(),
                    fmt1(row.row->mean_accuracy * 100).c_str(), delta_txt.c_str());
      text << line;
      csv << r.name << ',' << row.name << ',' << json_number(row.row->mean_tokens) << ','
          << json_number(row.row->mean_accuracy) << ','
          << (row.delta ? std::to_string(*row.delta) : "") << '\n';
    }
  }
  return {text.str(), csv.str()};
}

}  // namespace shortmk
