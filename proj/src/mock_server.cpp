#include "shortmk/mock_server.hpp"

#include <chrono>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "shortmk/types.hpp"

namespace shortmk {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

MockScenario MockScenario::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open scenario file: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw data_error("malformed scenario file: " + path);

  MockScenario scenario;
  scenario.tick_ms = j.value("tick_ms", scenario.tick_ms);
  scenario.stagger_ms = j.value("stagger_ms", scenario.stagger_ms);
  scenario.pause_on_close_ms = j.value("pause_on_close_ms", scenario.pause_on_close_ms);
  if (!j.contains("streams") || !j["streams"].is_array() || j["streams"].empty())
    throw data_error("scenario needs a non-empty 'streams' array: " + path);
  for (const json& s : j["streams"]) {
    MockStreamScript script;
    script.think_tokens = s.value("think_tokens", script.think_tokens);
    script.answer = s.value("answer", script.answer);
    if (s.contains("drop_after")) script.drop_after = s["drop_after"].get<int>();
    script.omit_think_open = s.value("omit_think_open", false);
    script.omit_think_close = s.value("omit_think_close", false);
    script.http_status = s.value("http_status", 0);
    if (s.contains("usage_reasoning_tokens"))
      script.usage_reasoning_tokens = s["usage_reasoning_tokens"].get<int>();
    scenario.streams.push_back(std::move(script));
  }
  return scenario;
}

std::string MockScenario::to_json() const {
  json j;
  j["tick_ms"] = tick_ms;
  j["stagger_ms"] = stagger_ms;
  j["pause_on_close_ms"] = pause_on_close_ms;
  j["streams"] = json::array();
  for (const MockStreamScript& s : streams) {
    json e;
    e["think_tokens"] = s.think_tokens;
    e["answer"] = s.answer;
    if (s.drop_after) e["drop_after"] = *s.drop_after;
    e["omit_think_open"] = s.omit_think_open;
    e["omit_think_close"] = s.omit_think_close;
    e["http_status"] = s.http_status;
    if (s.usage_reasoning_tokens) e["usage_reasoning_tokens"] = *s.usage_reasoning_tokens;
    j["streams"].push_back(std::move(e));
  }
  return j.dump(2);
}

struct MockServer::Impl {
  MockScenario scenario;
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> arrivals{0};

  // After any stream writes its think-close, other streams still thinking
  // hold off until this deadline, giving the client room to cancel cleanly.
  std::mutex pause_mu;
  Clock::time_point pause_until{};
  int pause_owner = -1;

  void wait_for_pause(int self) {
    for (;;) {
      Clock::time_point until;
      {
        std::lock_guard<std::mutex> lock(pause_mu);
        if (pause_owner == self || pause_until <= Clock::now()) return;
        until = pause_until;
      }
      std::this_thread::sleep_until(until);
    }
  }

  void arm_pause(int self) {
    std::lock_guard<std::mutex> lock(pause_mu);
    pause_until = Clock::now() + std::chrono::milliseconds(scenario.pause_on_close_ms);
    pause_owner = self;
  }

  static std::string sse_delta(const std::string& content) {
    json delta;
    delta["id"] = "chatcmpl-mock";
    delta["object"] = "chat.completion.chunk";
    delta["choices"] =
        json::array({json{{"index", 0}, {"delta", json{{"content", content}}}, {"finish_reason", nullptr}}});
    return "data: " + delta.dump() + "\n\n";
  }

  bool handle_stream(int request_index, httplib::DataSink& sink) {
    const MockStreamScript& script =
        scenario.streams[static_cast<std::size_t>(request_index) % scenario.streams.size()];
    const auto tick = std::chrono::milliseconds(scenario.tick_ms);

    std::this_thread::sleep_for(std::chrono::milliseconds(
        scenario.stagger_ms * (request_index % static_cast<int>(scenario.streams.size()))));

    auto write = [&](const std::string& payload) {
      return sink.write(payload.data(), payload.size());
    };

    std::vector<std::string> think_chunks;
    if (!script.omit_think_open) think_chunks.push_back("<think>");
    int emit = script.drop_after ? std::min(*script.drop_after, script.think_tokens)
                                 : script.think_tokens;
    for (int t = 0; t < emit; ++t) think_chunks.push_back("w" + std::to_string(t) + " ");

    for (const std::string& chunk : think_chunks) {
      std::this_thread::sleep_for(tick);
      wait_for_pause(request_index);
      if (!write(sse_delta(chunk))) return false;
    }
    if (script.drop_after && *script.drop_after <= script.think_tokens) return false;

    if (!script.omit_think_close) {
      std::this_thread::sleep_for(tick);
      wait_for_pause(request_index);
      arm_pause(request_index);
      if (!write(sse_delta("</think>"))) return false;

      std::istringstream words(script.answer);
      std::string word;
      std::string sep;
      while (words >> word) {
        std::this_thread::sleep_for(tick);
        if (!write(sse_delta(sep + word))) return false;
        sep = " ";
      }
    }

    if (script.usage_reasoning_tokens) {
      json usage;
      usage["id"] = "chatcmpl-mock";
      usage["object"] = "chat.completion.chunk";
      usage["choices"] = json::array();
      usage["usage"] = json{{"completion_tokens_details",
                             json{{"reasoning_tokens", *script.usage_reasoning_tokens}}}};
      if (!write("data: " + usage.dump() + "\n\n")) return false;
    }

    if (!write("data: [DONE]\n\n")) return false;
    sink.done();
    return true;
  }
};

MockServer::MockServer(MockScenario scenario) : impl_(std::make_unique<Impl>()) {
  if (scenario.streams.empty()) throw config_error("mock scenario needs at least one stream");
  impl_->scenario = std::move(scenario);
}

MockServer::~MockServer() { stop(); }

void MockServer::start() {
  Impl* impl = impl_.get();
  impl->server.new_task_queue = [] { return new httplib::ThreadPool(48); };
  impl->server.Post("/v1/chat/completions", [impl](const httplib::Request& req,
                                                   httplib::Response& res) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.value("stream", false)) {
      res.status = 400;
      res.set_content("{\"error\":\"expected a streaming chat completion request\"}",
                      "application/json");
      return;
    }
    int index = impl->arrivals.fetch_add(1);
    const MockStreamScript& script =
        impl->scenario.streams[static_cast<std::size_t>(index) % impl->scenario.streams.size()];
    if (script.http_status != 0) {
      res.status = script.http_status;
      res.set_content("{\"error\":\"scripted failure\"}", "application/json");
      return;
    }
    res.set_chunked_content_provider(
        "text/event-stream", [impl, index](std::size_t offset, httplib::DataSink& sink) {
          if (offset > 0) return false;
          return impl->handle_stream(index, sink);
        });
  });

  impl->port = impl->server.bind_to_any_port("127.0.0.1");
  if (impl->port <= 0) throw transport_error("mock server failed to bind a port");
  impl->thread = std::thread([impl] { impl->server.listen_after_bind(); });
  impl->server.wait_until_ready();
}

void MockServer::stop() {
  if (!impl_) return;
  if (impl_->thread.joinable()) {
    impl_->server.stop();
    impl_->thread.join();
  }
}

int MockServer::port() const { return impl_->port; }

std::string MockServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port) + "/v1";
}

int MockServer::requests_served() const { return impl_->arrivals.load(); }

}  // namespace shortmk
