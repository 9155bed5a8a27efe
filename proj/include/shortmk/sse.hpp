#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace shortmk {

// Incremental server-sent-events parser. Only the `data:` field matters for
// the chat-completions stream; event/id/retry fields and comments are
// ignored. Multi-line data payloads are joined with '\n' per the SSE spec.
class SseParser {
 public:
  // Invokes on_data once per dispatched event.
  void feed(std::string_view bytes, const std::function<void(std::string_view)>& on_data);

  // Collecting variant, mostly for tests.
  std::vector<std::string> feed(std::string_view bytes);

 private:
  void process_line(std::string_view line, const std::function<void(std::string_view)>& on_data);

  std::string buffer_;
  std::vector<std::string> data_lines_;
};

}  // namespace shortmk
