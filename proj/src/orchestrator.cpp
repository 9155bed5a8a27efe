#include "shortmk/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "shortmk/jsonl.hpp"
#include "shortmk/metrics.hpp"
#include "shortmk/rng.hpp"
#include "shortmk/sse.hpp"
#include "shortmk/think_counter.hpp"

namespace shortmk {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string_view to_string(StreamPhase p) {
  switch (p) {
    case StreamPhase::AwaitingThinkOpen: return "awaiting_think_open";
    case StreamPhase::Thinking: return "thinking";
    case StreamPhase::Answering: return "answering";
    case StreamPhase::Done: return "done";
    case StreamPhase::Cancelled: return "cancelled";
    case StreamPhase::Failed: return "failed";
  }
  return "failed";
}

bool phase_transition_allowed(StreamPhase from, StreamPhase to) {
  const bool from_terminal = from == StreamPhase::Done || from == StreamPhase::Cancelled ||
                             from == StreamPhase::Failed;
  if (from_terminal) return false;
  switch (to) {
    case StreamPhase::Thinking: return from == StreamPhase::AwaitingThinkOpen;
    case StreamPhase::Answering: return from == StreamPhase::Thinking;
    case StreamPhase::Done: return from == StreamPhase::Answering;
    case StreamPhase::Cancelled:
    case StreamPhase::Failed: return true;
    case StreamPhase::AwaitingThinkOpen: return false;
  }
  return false;
}

void StreamState::advance(StreamPhase next) {
  if (!phase_transition_allowed(phase, next))
    throw std::logic_error(std::string("illegal stream phase transition ") +
                           std::string(to_string(phase)) + " -> " + std::string(to_string(next)));
  phase = next;
}

void StreamState::add_think_tokens(std::int64_t n) {
  if (n < 0) throw std::logic_error("think token count may not decrease");
  think_tokens_so_far += n;
}

std::vector<PromptSpec> read_prompts_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open prompts file: " + path);
  std::vector<PromptSpec> prompts;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("prompt"))
      throw data_error(path + ":" + std::to_string(line_no) +
                       ": expected {\"question_id\":..., \"prompt\":..., \"gold_answer\":...}");
    PromptSpec p;
    p.prompt = j["prompt"].get<std::string>();
    p.question_id = j.value("question_id", "q" + std::to_string(line_no));
    p.gold_answer = j.value("gold_answer", std::string());
    prompts.push_back(std::move(p));
  }
  if (prompts.empty()) throw data_error("prompts file is empty: " + path);
  return prompts;
}

namespace {

struct Endpoint {
  std::string host_port;  // scheme://host:port for httplib
  std::string path;       // .../chat/completions
};

Endpoint parse_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw config_error("endpoint_url must start with http:// or https://: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  Endpoint ep;
  std::string base;
  if (path_start == std::string::npos) {
    ep.host_port = url;
    base = "";
  } else {
    ep.host_port = url.substr(0, path_start);
    base = url.substr(path_start);
  }
  while (!base.empty() && base.back() == '/') base.pop_back();
  if (base.size() < 3 || base.substr(base.size() - 3) != "/v1") base += "/v1";
  ep.path = base + "/chat/completions";
  return ep;
}

enum class EventType { ThinkOpen, Tokens, ThinkClose, Done, Failed };

struct StreamEvent {
  int stream = 0;
  EventType type = EventType::Done;
  std::int64_t tokens = 0;
};

class EventQueue {
 public:
  void push(StreamEvent e) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      q_.push_back(e);
    }
    cv_.notify_one();
  }
  StreamEvent pop() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return !q_.empty(); });
    StreamEvent e = q_.front();
    q_.pop_front();
    return e;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<StreamEvent> q_;
};

struct WorkerOutput {
  std::int64_t think_tokens = 0;
  bool opened = false;
  bool closed = false;
  std::string answer_text;
  std::string think_text;
  bool done_marker = false;
  bool cancelled = false;
  bool connect_failed = false;  // no stream data ever arrived
  std::optional<std::int64_t> usage_reasoning_tokens;
  double duration_seconds = 0.0;  // start -> think-close, when closed
};

struct RaceContext {
  const RunConfig* config;
  Endpoint endpoint;
  std::string payload;
  std::string api_key;
  EventQueue queue;
  std::vector<std::unique_ptr<std::atomic<bool>>> cancel;
  std::vector<WorkerOutput> outputs;
};

void run_stream_worker(RaceContext& ctx, int index) {
  const RunConfig& cfg = *ctx.config;
  WorkerOutput& out = ctx.outputs[index];
  std::atomic<bool>& cancel = *ctx.cancel[index];
  Rng backoff_rng(mix_seed(cfg.rng_seed, 0xb0ffull + static_cast<std::uint64_t>(index)));

  for (int attempt = 0; attempt <= cfg.retry_budget; ++attempt) {
    ThinkStreamCounter counter(cfg.think_open, cfg.think_close, cfg.count_unit);
    counter.set_capture_think(cfg.log_think_text);
    SseParser sse;
    bool got_data = false;
    bool done_marker = false;
    std::optional<std::int64_t> usage_rt;
    const auto started = Clock::now();
    double closed_at = 0.0;

    httplib::Client client(ctx.endpoint.host_port);
    client.set_connection_timeout(std::chrono::milliseconds(
        static_cast<int>(cfg.connect_timeout_s * 1000)));
    client.set_read_timeout(std::chrono::milliseconds(
        static_cast<int>(cfg.read_timeout_s * 1000)));

    httplib::Request req;
    req.method = "POST";
    req.path = ctx.endpoint.path;
    req.set_header("Content-Type", "application/json");
    req.set_header("Accept", "text/event-stream");
    if (!ctx.api_key.empty()) req.set_header("Authorization", "Bearer " + ctx.api_key);
    req.body = ctx.payload;

    bool status_ok = false;
    req.response_handler = [&](const httplib::Response& r) {
      status_ok = r.status >= 200 && r.status < 300;
      return true;
    };
    req.content_receiver = [&](const char* data, std::size_t len, std::uint64_t, std::uint64_t) {
      if (!status_ok) return true;  // drain error bodies; retry logic handles them
      if (cancel.load(std::memory_order_relaxed)) {
        out.cancelled = true;
        return false;
      }
      got_data = true;
      sse.feed(std::string_view(data, len), [&](std::string_view event) {
        if (event == "[DONE]") {
          done_marker = true;
          return;
        }
        json j = json::parse(event, nullptr, false);
        if (j.is_discarded()) return;
        if (j.contains("usage") && j["usage"].contains("completion_tokens_details")) {
          const json& details = j["usage"]["completion_tokens_details"];
          if (details.contains("reasoning_tokens"))
            usage_rt = details["reasoning_tokens"].get<std::int64_t>();
        }
        if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) return;
        const json& delta = j["choices"][0].value("delta", json::object());
        if (!delta.contains("content") || !delta["content"].is_string()) return;
        std::string content = delta["content"].get<std::string>();
        if (content.empty()) return;
        auto events = counter.feed(content);
        if (events.opened) ctx.queue.push({index, EventType::ThinkOpen, 0});
        if (events.tokens_added > 0 && counter.opened() && !events.closed)
          ctx.queue.push({index, EventType::Tokens, events.tokens_added});
        if (events.closed) {
          closed_at = std::chrono::duration<double>(Clock::now() - started).count();
          ctx.queue.push({index, EventType::ThinkClose, counter.think_tokens()});
        }
      });
      return true;
    };

    httplib::Response res;
    httplib::Error err = httplib::Error::Success;
    bool ok = client.send(req, res, err);
    counter.end_of_stream();

    const bool http_ok = ok && res.status >= 200 && res.status < 300;
    if (!http_ok && !out.cancelled && !got_data && attempt < cfg.retry_budget) {
      std::this_thread::sleep_for(std::chrono::milliseconds(
          50 * (attempt + 1) + static_cast<int>(backoff_rng.uniform_below(50))));
      continue;
    }

    out.think_tokens = counter.think_tokens();
    out.opened = counter.opened();
    out.closed = counter.closed();
    out.answer_text = counter.answer_text();
    out.think_text = counter.think_text();
    out.done_marker = done_marker;
    out.usage_reasoning_tokens = usage_rt;
    if (counter.closed()) out.duration_seconds = closed_at;
    out.connect_failed = !got_data && !http_ok;

    const bool finished_clean = http_ok && done_marker && !out.cancelled;
    if (finished_clean && counter.closed())
      ctx.queue.push({index, EventType::Done, 0});
    else
      ctx.queue.push({index, EventType::Failed, 0});
    return;
  }
}

struct InternalRaceOptions {
  std::optional<int> halt_after_m;  // nullopt: run everything to completion
  int n_streams = 1;
};

RaceResult run_streams(const RunConfig& cfg, const PromptSpec& prompt,
                       const AnswerPolicy& policy, const InternalRaceOptions& opts) {
  RaceContext ctx;
  ctx.config = &cfg;
  ctx.endpoint = parse_endpoint(cfg.endpoint_url);
  if (!cfg.api_key_env.empty()) {
    if (const char* key = std::getenv(cfg.api_key_env.c_str())) ctx.api_key = key;
  }
  json payload;
  payload["model"] = cfg.model_name;
  payload["messages"] = json::array({json{{"role", "user"}, {"content", prompt.prompt}}});
  payload["temperature"] = cfg.temperature;
  payload["top_p"] = cfg.top_p;
  payload["max_tokens"] = cfg.max_tokens;
  payload["stream"] = true;
  ctx.payload = payload.dump();

  const int n = opts.n_streams;
  ctx.outputs.resize(n);
  ctx.cancel.reserve(n);
  for (int i = 0; i < n; ++i) ctx.cancel.push_back(std::make_unique<std::atomic<bool>>(false));

  std::vector<StreamState> states(n);
  for (int i = 0; i < n; ++i) states[i].sample_index = i;

  std::vector<std::thread> threads;
  threads.reserve(n);
  for (int i = 0; i < n; ++i)
    threads.emplace_back([&ctx, i] {
      try {
        run_stream_worker(ctx, i);
      } catch (...) {
        ctx.queue.push({i, EventType::Failed, 0});
      }
    });

  // The coordinator owns the halt decision; it is taken exactly once.
  std::vector<int> winner_order;
  bool halted = false;
  int closes = 0;
  int terminals = 0;
  while (terminals < n) {
    StreamEvent ev = ctx.queue.pop();
    StreamState& st = states[ev.stream];
    switch (ev.type) {
      case EventType::ThinkOpen:
        st.advance(StreamPhase::Thinking);
        break;
      case EventType::Tokens:
        st.add_think_tokens(ev.tokens);
        break;
      case EventType::ThinkClose:
        if (st.phase == StreamPhase::AwaitingThinkOpen) st.advance(StreamPhase::Thinking);
        st.advance(StreamPhase::Answering);
        ++closes;
        if (!halted) winner_order.push_back(ev.stream);
        if (opts.halt_after_m && !halted && closes >= *opts.halt_after_m) {
          halted = true;
          for (int j = 0; j < n; ++j) {
            if (states[j].phase == StreamPhase::AwaitingThinkOpen ||
                states[j].phase == StreamPhase::Thinking)
              ctx.cancel[j]->store(true);
          }
        }
        break;
      case EventType::Done:
        st.advance(StreamPhase::Done);
        ++terminals;
        break;
      case EventType::Failed:
        st.advance(ctx.outputs[ev.stream].cancelled ? StreamPhase::Cancelled
                                                    : StreamPhase::Failed);
        ++terminals;
        break;
    }
  }
  for (std::thread& t : threads) t.join();

  const bool all_unreachable =
      std::all_of(ctx.outputs.begin(), ctx.outputs.end(),
                  [](const WorkerOutput& o) { return o.connect_failed; });
  if (all_unreachable)
    throw transport_error("endpoint unreachable or rejecting all requests: " + cfg.endpoint_url);

  const bool graded = !prompt.gold_answer.empty();
  const std::string gold = graded ? normalize_answer(prompt.gold_answer) : std::string();

  QuestionLog log;
  log.question_id = prompt.question_id;
  log.prompt = prompt.prompt;
  log.gold_answer = gold;
  log.model = cfg.model_name;
  log.temperature = cfg.temperature;
  log.top_p = cfg.top_p;

  for (int i = 0; i < n; ++i) {
    const WorkerOutput& out = ctx.outputs[i];
    GenerationRecord rec;
    rec.question_id = prompt.question_id;
    rec.sample_index = i;
    rec.think_tokens = out.think_tokens;
    if (out.usage_reasoning_tokens && out.closed)
      rec.think_tokens = *out.usage_reasoning_tokens;
    rec.answer_raw = out.answer_text;
    switch (states[i].phase) {
      case StreamPhase::Done:
        rec.finish = Finish::ThinkCompleted;
        break;
      case StreamPhase::Cancelled:
        rec.finish = Finish::Cancelled;
        break;
      default:
        rec.finish = (out.done_marker && !out.closed) ? Finish::ThinkTruncated : Finish::Errored;
        break;
    }
    if (out.closed) rec.duration_seconds = out.duration_seconds;
    if (rec.finish == Finish::ThinkCompleted) {
      rec.answer_extracted = extract_answer(rec.answer_raw, policy);
      if (graded) rec.correct = grade(rec.answer_extracted, gold, policy);
    }
    if (cfg.log_think_text && !out.think_text.empty())
      rec.extras.emplace_back("think_text", json_string(out.think_text));
    log.generations.push_back(std::move(rec));
  }

  RaceResult result;
  result.log = std::move(log);

  if (opts.halt_after_m) {
    std::vector<VoteCandidate> candidates;
    std::vector<std::size_t> winner_records;
    for (int idx : winner_order) {
      if (states[idx].phase != StreamPhase::Done) continue;  // dropped while answering
      const GenerationRecord& rec = result.log.generations[idx];
      candidates.push_back(
          {rec.answer_extracted, rec.think_tokens, rec.correct.value_or(false)});
      winner_records.push_back(static_cast<std::size_t>(idx));
    }
    result.finishers = static_cast<int>(candidates.size());
    result.degraded = result.finishers < *opts.halt_after_m;
    if (candidates.empty())
      throw data_error("race failed: zero streams finished thinking for question '" +
                       prompt.question_id + "'");
    Rng vote_rng(mix_seed(cfg.rng_seed, fnv1a64(prompt.question_id)));
    VoteResult vote = majority_vote(candidates, cfg.tie_break, vote_rng);
    result.chosen_answer = vote.answer;

    std::string race_meta = "{\"k\":" + std::to_string(opts.n_streams) +
                            ",\"m\":" + std::to_string(*opts.halt_after_m) +
                            ",\"tie_break\":" + json_string(std::string(to_string(cfg.tie_break))) +
                            ",\"finishers\":" + std::to_string(result.finishers) +
                            ",\"degraded\":" + (result.degraded ? "true" : "false") + "}";
    result.log.extras.emplace_back("race", race_meta);
  } else {
    result.finishers = result.log.usable_count();
  }
  return result;
}

}  // namespace

RaceResult race_question(const RunConfig& config, const PromptSpec& prompt,
                         const AnswerPolicy& policy) {
  config.validate();
  policy.validate();
  InternalRaceOptions opts;
  opts.halt_after_m = config.m;
  opts.n_streams = config.k;
  return run_streams(config, prompt, policy, opts);
}

std::vector<QuestionLog> generate_pool(const RunConfig& config,
                                       std::span<const PromptSpec> prompts, int n_samples,
                                       const AnswerPolicy& policy) {
  config.validate();
  policy.validate();
  if (n_samples < 1) throw config_error("n_samples must be >= 1");
  if (prompts.empty()) throw config_error("no prompts given");

  std::vector<QuestionLog> logs;
  logs.reserve(prompts.size());
  for (const PromptSpec& prompt : prompts) {
    InternalRaceOptions opts;
    opts.halt_after_m = std::nullopt;
    opts.n_streams = n_samples;
    RaceResult result = run_streams(config, prompt, policy, opts);
    logs.push_back(std::move(result.log));
  }
  return logs;
}

}  // namespace shortmk
