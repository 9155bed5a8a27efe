#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shortmk/types.hpp"

namespace shortmk {

// Online thinking-token counter over a stream of text deltas. Detects the
// first think-open marker and the first subsequent think-close marker even
// when a marker is split across chunk boundaries, counts tokens strictly
// between them, and accumulates everything after the close as answer text.
//
// When the stream never emits think-open, all text before the close (or the
// whole completion, if the close never arrives) counts as thinking.
//
// Token units: Chunks counts the number of deltas that contributed at least
// one character of thinking content (the live default; chunk ~ token for
// typical streaming servers). Whitespace counts whitespace-separated words
// and is exact regardless of chunking.
class ThinkStreamCounter {
 public:
  ThinkStreamCounter(std::string think_open, std::string think_close, TokenUnit unit);

  struct FeedEvents {
    bool opened = false;
    bool closed = false;
    std::int64_t tokens_added = 0;
  };

  FeedEvents feed(std::string_view chunk);

  // Flushes held-back bytes at end of stream.
  void end_of_stream();

  // Retain the thinking text itself (off by default; counting never needs it).
  void set_capture_think(bool capture) { capture_ = capture; }

  std::int64_t think_tokens() const { return think_tokens_; }
  bool opened() const { return opened_; }
  bool closed() const { return closed_; }
  const std::string& answer_text() const { return answer_; }
  const std::string& think_text() const { return think_text_; }

 private:
  std::int64_t consume_content(std::string_view text, std::size_t first_chunk_offset);

  std::string open_;
  std::string close_;
  TokenUnit unit_;

  // Held-back bytes that may still turn out to be a marker prefix, with the
  // chunk sequence number each byte came from (for chunk-unit attribution).
  std::string pending_;
  std::vector<std::int64_t> pending_chunk_;

  std::int64_t chunk_seq_ = -1;
  std::int64_t last_counted_chunk_ = -1;
  std::int64_t think_tokens_ = 0;
  bool opened_ = false;
  bool closed_ = false;
  bool in_word_ = false;  // whitespace-unit carry across chunk boundaries
  bool capture_ = false;
  std::string answer_;
  std::string think_text_;
};

// Pure convenience wrapper: returns (think_tokens, think_closed).
std::pair<std::int64_t, bool> count_think_stream(std::span<const std::string> token_events,
                                                 const std::string& think_open,
                                                 const std::string& think_close,
                                                 TokenUnit unit);

}  // namespace shortmk
