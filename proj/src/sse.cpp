#include "shortmk/sse.hpp"

namespace shortmk {

void SseParser::feed(std::string_view bytes,
                     const std::function<void(std::string_view)>& on_data) {
  buffer_.append(bytes);
  std::size_t pos = 0;
  std::size_t newline;
  while ((newline = buffer_.find('\n', pos)) != std::string::npos) {
    std::size_t end = newline;
    if (end > pos && buffer_[end - 1] == '\r') --end;
    process_line(std::string_view(buffer_).substr(pos, end - pos), on_data);
    pos = newline + 1;
  }
  buffer_.erase(0, pos);
}

std::vector<std::string> SseParser::feed(std::string_view bytes) {
  std::vector<std::string> events;
  feed(bytes, [&](std::string_view data) { events.emplace_back(data); });
  return events;
}

void SseParser::process_line(std::string_view line,
                             const std::function<void(std::string_view)>& on_data) {
  if (line.empty()) {
    // Blank line dispatches the pending event.
    if (!data_lines_.empty()) {
      std::string joined;
      for (std::size_t i = 0; i < data_lines_.size(); ++i) {
        if (i > 0) joined.push_back('\n');
        joined += data_lines_[i];
      }
      data_lines_.clear();
      on_data(joined);
    }
    return;
  }
  if (line.front() == ':') return;  // comment

  std::string_view field = line;
  std::string_view value;
  std::size_t colon = line.find(':');
  if (colon != std::string_view::npos) {
    field = line.substr(0, colon);
    value = line.substr(colon + 1);
    if (!value.empty() && value.front() == ' ') value.remove_prefix(1);
  }
  if (field == "data") data_lines_.emplace_back(value);
  // event/id/retry fields are irrelevant for chat-completions streams.
}

}  // namespace shortmk
