#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace shortmk {

// Scripted OpenAI-compatible streaming endpoint for tests. Speaks the real
// wire format (POST /v1/chat/completions, "stream": true, SSE framing,
// [DONE] terminator) but emits per-stream token schedules from a scenario,
// with fault injection.
//
// Each request is assigned the next script in arrival order (wrapping).
// Streams advance one chunk per tick. After any stream writes its
// think-close, other streams still thinking hold off for pause_on_close_ms
// before their next chunk, so a prompt client-side cancellation lands before
// any further token is delivered and recorded counts stay exact.
struct MockStreamScript {
  int think_tokens = 5;
  std::string answer = "The answer is 1";
  std::optional<int> drop_after;  // abort (no [DONE]) after this many think tokens
  bool omit_think_open = false;
  bool omit_think_close = false;  // think tokens then [DONE]: truncated thinking
  int http_status = 0;            // nonzero: fail the request up front with this status
  std::optional<int> usage_reasoning_tokens;  // reported in a usage event before [DONE]
};

struct MockScenario {
  int tick_ms = 10;
  int stagger_ms = 3;           // per-stream offset within a tick
  int pause_on_close_ms = 400;
  std::vector<MockStreamScript> streams;

  static MockScenario load_file(const std::string& path);
  std::string to_json() const;
};

class MockServer {
 public:
  explicit MockServer(MockScenario scenario);
  ~MockServer();

  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  // Binds 127.0.0.1 on a free port and serves until stop().
  void start();
  void stop();

  int port() const;
  std::string base_url() const;  // http://127.0.0.1:<port>/v1

  int requests_served() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace shortmk
