// Standalone scripted OpenAI-compatible mock endpoint, for manual runs and
// wire-level debugging. Tests normally embed MockServer in-process instead.

#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "shortmk/mock_server.hpp"

namespace {
volatile std::sig_atomic_t g_stop = 0;
void handle_signal(int) { g_stop = 1; }
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scripted streaming chat-completions mock server"};
  std::string scenario_path;
  app.add_option("--scenario", scenario_path, "scenario JSON file")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    shortmk::MockScenario scenario = shortmk::MockScenario::load_file(scenario_path);
    shortmk::MockServer server(std::move(scenario));
    server.start();
    std::cout << "listening on " << server.base_url() << std::endl;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
