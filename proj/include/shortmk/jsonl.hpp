#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "shortmk/types.hpp"

namespace shortmk {

// JSONL log schema. A log file is a sequence of question blocks: one header
// line (question metadata) followed by one line per GenerationRecord.
// Serialization is canonical: fixed field order, shortest round-trip number
// formatting, unknown input fields preserved verbatim after the known ones.

std::string serialize_record(const GenerationRecord& rec);
std::string serialize_header(const QuestionLog& log);

enum class LineKind { Header, Record };

// Throws data_error on malformed lines.
LineKind classify_line(std::string_view line);
GenerationRecord parse_record(std::string_view line);
QuestionLog parse_header(std::string_view line);  // generations left empty

void write_question_log(std::ostream& out, const QuestionLog& log);

// `source` is used in error messages ("file:line: ...").
std::vector<QuestionLog> read_question_logs(std::istream& in, const std::string& source);
std::vector<QuestionLog> read_question_log_file(const std::string& path);
void write_question_log_file(const std::string& path, const std::vector<QuestionLog>& logs);

// Canonical number/string fragments, exposed for reuse by other writers.
std::string json_number(double v);
std::string json_number(std::int64_t v);
std::string json_string(std::string_view s);

}  // namespace shortmk
