#include "shortmk/think_counter.hpp"

#include <algorithm>
#include <cctype>

namespace shortmk {

ThinkStreamCounter::ThinkStreamCounter(std::string think_open, std::string think_close,
                                       TokenUnit unit)
    : open_(std::move(think_open)), close_(std::move(think_close)), unit_(unit) {}

// Counts content that has been resolved (cannot be part of a marker anymore).
// Before think-open the count is tentative: it is discarded if the open
// marker shows up, and stands as "the whole prefix was thinking" otherwise.
std::int64_t ThinkStreamCounter::consume_content(std::string_view text,
                                                 std::size_t first_char_index) {
  std::int64_t added = 0;
  if (capture_) think_text_.append(text);
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (unit_ == TokenUnit::Whitespace) {
      bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
      if (!space && !in_word_) added++;
      in_word_ = !space;
    } else {
      std::int64_t chunk = pending_chunk_[first_char_index + i];
      if (chunk > last_counted_chunk_) {
        last_counted_chunk_ = chunk;
        added++;
      }
    }
  }
  return added;
}

ThinkStreamCounter::FeedEvents ThinkStreamCounter::feed(std::string_view chunk) {
  FeedEvents events;
  ++chunk_seq_;
  if (closed_) {
    answer_ += chunk;
    return events;
  }

  pending_.append(chunk);
  pending_chunk_.resize(pending_.size(), chunk_seq_);

  for (;;) {
    const std::string& marker = opened_ ? close_ : open_;
    // The close marker also ends an unopened thinking prefix.
    std::size_t close_pos = std::string::npos;
    std::size_t open_pos = std::string::npos;
    if (!opened_) {
      open_pos = pending_.find(open_);
      close_pos = pending_.find(close_);
    } else {
      close_pos = pending_.find(marker);
    }

    if (!opened_ && open_pos != std::string::npos &&
        (close_pos == std::string::npos || open_pos < close_pos)) {
      // Tentative prefix tokens are discarded: counting starts at the marker.
      think_tokens_ = 0;
      in_word_ = false;
      last_counted_chunk_ = -1;
      think_text_.clear();
      opened_ = true;
      events.opened = true;
      pending_.erase(0, open_pos + open_.size());
      pending_chunk_.erase(pending_chunk_.begin(),
                           pending_chunk_.begin() + static_cast<std::ptrdiff_t>(open_pos + open_.size()));
      continue;
    }

    if (close_pos != std::string::npos) {
      std::int64_t added = consume_content(std::string_view(pending_).substr(0, close_pos), 0);
      think_tokens_ += added;
      events.tokens_added += added;
      events.closed = true;
      closed_ = true;
      answer_.append(pending_, close_pos + close_.size(), std::string::npos);
      pending_.clear();
      pending_chunk_.clear();
      return events;
    }
    break;
  }

  // Hold back a possible marker prefix; everything earlier is content.
  std::size_t hold = std::max(open_.size(), close_.size());
  hold = hold > 0 ? hold - 1 : 0;
  if (pending_.size() > hold) {
    std::size_t resolve = pending_.size() - hold;
    std::int64_t added = consume_content(std::string_view(pending_).substr(0, resolve), 0);
    think_tokens_ += added;
    events.tokens_added += added;
    pending_.erase(0, resolve);
    pending_chunk_.erase(pending_chunk_.begin(),
                         pending_chunk_.begin() + static_cast<std::ptrdiff_t>(resolve));
  }
  return events;
}

void ThinkStreamCounter::end_of_stream() {
  if (closed_) return;
  think_tokens_ += consume_content(pending_, 0);
  pending_.clear();
  pending_chunk_.clear();
}

std::pair<std::int64_t, bool> count_think_stream(std::span<const std::string> token_events,
                                                 const std::string& think_open,
                                                 const std::string& think_close,
                                                 TokenUnit unit) {
  ThinkStreamCounter counter(think_open, think_close, unit);
  for (const std::string& delta : token_events) counter.feed(delta);
  counter.end_of_stream();
  return {counter.think_tokens(), counter.closed()};
}

}  // namespace shortmk
