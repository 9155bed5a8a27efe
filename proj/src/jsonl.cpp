#include "shortmk/jsonl.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace shortmk {

using ordered_json = nlohmann::ordered_json;

std::string json_number(double v) {
  if (!std::isfinite(v)) throw data_error("non-finite number in log output");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  // Bare integers stay valid JSON, but keep parse(serialize(x)) stable by
  // emitting what to_chars produced; nothing to adjust.
  return s;
}

std::string json_number(std::int64_t v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string json_string(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out.push_back('"');
  return out;
}

namespace {

void append_field(std::string& out, bool& first, std::string_view key, std::string value) {
  if (!first) out.push_back(',');
  first = false;
  out += json_string(key);
  out.push_back(':');
  out += value;
}

void append_extras(std::string& out, bool& first, const ExtraFields& extras) {
  for (const auto& [key, raw] : extras) append_field(out, first, key, raw);
}

ordered_json parse_line_object(std::string_view line) {
  ordered_json j = ordered_json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw data_error("line is not a JSON object");
  return j;
}

std::string require_string(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string())
    throw data_error(std::string("missing or non-string field '") + key + "'");
  return j[key].get<std::string>();
}

}  // namespace

std::string serialize_record(const GenerationRecord& rec) {
  std::string out;
  out.reserve(128 + rec.answer_raw.size());
  out.push_back('{');
  bool first = true;
  append_field(out, first, "question_id", json_string(rec.question_id));
  append_field(out, first, "sample_index", json_number(static_cast<std::int64_t>(rec.sample_index)));
  append_field(out, first, "think_tokens", json_number(rec.think_tokens));
  append_field(out, first, "answer_raw", json_string(rec.answer_raw));
  if (rec.answer_extracted)
    append_field(out, first, "answer_extracted", json_string(*rec.answer_extracted));
  if (rec.correct) append_field(out, first, "correct", *rec.correct ? "true" : "false");
  if (rec.duration_seconds)
    append_field(out, first, "duration_seconds", json_number(*rec.duration_seconds));
  append_field(out, first, "finish", json_string(to_string(rec.finish)));
  append_extras(out, first, rec.extras);
  out.push_back('}');
  return out;
}

std::string serialize_header(const QuestionLog& log) {
  std::string out;
  out.push_back('{');
  bool first = true;
  append_field(out, first, "question_id", json_string(log.question_id));
  append_field(out, first, "prompt", json_string(log.prompt));
  append_field(out, first, "gold_answer", json_string(log.gold_answer));
  append_field(out, first, "model", json_string(log.model));
  append_field(out, first, "temperature", json_number(log.temperature));
  append_field(out, first, "top_p", json_number(log.top_p));
  append_extras(out, first, log.extras);
  out.push_back('}');
  return out;
}

LineKind classify_line(std::string_view line) {
  ordered_json j = parse_line_object(line);
  if (j.contains("sample_index")) return LineKind::Record;
  if (j.contains("prompt")) return LineKind::Header;
  throw data_error("line is neither a header (no 'prompt') nor a record (no 'sample_index')");
}

GenerationRecord parse_record(std::string_view line) {
  ordered_json j = parse_line_object(line);
  GenerationRecord rec;
  rec.question_id = require_string(j, "question_id");
  if (!j.contains("sample_index") || !j["sample_index"].is_number_integer())
    throw data_error("missing or non-integer field 'sample_index'");
  rec.sample_index = j["sample_index"].get<int>();
  if (!j.contains("think_tokens") || !j["think_tokens"].is_number_integer())
    throw data_error("missing or non-integer field 'think_tokens'");
  rec.think_tokens = j["think_tokens"].get<std::int64_t>();
  rec.answer_raw = require_string(j, "answer_raw");
  if (j.contains("answer_extracted")) {
    if (!j["answer_extracted"].is_string()) throw data_error("non-string 'answer_extracted'");
    rec.answer_extracted = j["answer_extracted"].get<std::string>();
  }
  if (j.contains("correct")) {
    if (!j["correct"].is_boolean()) throw data_error("non-boolean 'correct'");
    rec.correct = j["correct"].get<bool>();
  }
  if (j.contains("duration_seconds")) {
    if (!j["duration_seconds"].is_number()) throw data_error("non-numeric 'duration_seconds'");
    rec.duration_seconds = j["duration_seconds"].get<double>();
  }
  auto fin = finish_from_string(require_string(j, "finish"));
  if (!fin) throw data_error("unknown finish value '" + j["finish"].get<std::string>() + "'");
  rec.finish = *fin;

  static const std::set<std::string> known = {
      "question_id", "sample_index", "think_tokens",     "answer_raw",
      "answer_extracted", "correct", "duration_seconds", "finish"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) rec.extras.emplace_back(key, value.dump());
  return rec;
}

QuestionLog parse_header(std::string_view line) {
  ordered_json j = parse_line_object(line);
  QuestionLog log;
  log.question_id = require_string(j, "question_id");
  log.prompt = require_string(j, "prompt");
  log.gold_answer = require_string(j, "gold_answer");
  log.model = require_string(j, "model");
  if (!j.contains("temperature") || !j["temperature"].is_number())
    throw data_error("missing or non-numeric field 'temperature'");
  log.temperature = j["temperature"].get<double>();
  if (!j.contains("top_p") || !j["top_p"].is_number())
    throw data_error("missing or non-numeric field 'top_p'");
  log.top_p = j["top_p"].get<double>();

  static const std::set<std::string> known = {"question_id", "prompt",      "gold_answer",
                                              "model",       "temperature", "top_p"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) log.extras.emplace_back(key, value.dump());
  return log;
}

void write_question_log(std::ostream& out, const QuestionLog& log) {
  out << serialize_header(log) << '\n';
  for (const GenerationRecord& rec : log.generations) out << serialize_record(rec) << '\n';
}

std::vector<QuestionLog> read_question_logs(std::istream& in, const std::string& source) {
  std::vector<QuestionLog> logs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      if (classify_line(line) == LineKind::Header) {
        logs.push_back(parse_header(line));
      } else {
        if (logs.empty())
          throw data_error("record line before any header line");
        logs.back().generations.push_back(parse_record(line));
      }
    } catch (const data_error& e) {
      throw data_error(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return logs;
}

std::vector<QuestionLog> read_question_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open log file: " + path);
  return read_question_logs(in, path);
}

void write_question_log_file(const std::string& path, const std::vector<QuestionLog>& logs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write log file: " + path);
  for (const QuestionLog& log : logs) write_question_log(out, log);
}

}  // namespace shortmk
