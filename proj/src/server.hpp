#pragma once

// HTTP front end for the engine. Clients POST newline-delimited messages to
// /send and read their outbound lines from /stream as server-sent events.
// One loop thread steps the engine at the tick rate; request threads only
// enqueue.

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "engine.hpp"

namespace httplib {
class Server;
}

namespace gesteach {

struct ServerOptions {
  std::string endpoint = "127.0.0.1:8765";  // port 0 picks a free port
  std::optional<std::filesystem::path> record_path;
  std::size_t max_queued_lines = 4096;  // per connection; beyond this it is dropped
  bool keep_transcript = false;
};

/// Splits "host:port". InvalidArgument when malformed.
std::pair<std::string, int> parse_endpoint(const std::string& endpoint);

class GatewayServer {
 public:
  GatewayServer(std::unique_ptr<Engine> engine, ServerOptions options);
  ~GatewayServer();
  GatewayServer(const GatewayServer&) = delete;
  GatewayServer& operator=(const GatewayServer&) = delete;

  /// Binds and starts serving. Throws BindFailure, IoError (record file).
  void start();
  /// Idempotent. Writes the log end mark.
  void stop();
  /// Waits up to timeout_ms for stop(); true once stopped.
  bool wait_for(std::int64_t timeout_ms);

  int port() const { return port_; }
  std::int64_t now_ms();
  std::optional<std::string> program_text();
  std::string transcript();

 private:
  struct Conn {
    std::deque<std::string> queue;
    bool closed = false;
    bool streaming = false;
  };

  void tick_loop();
  void distribute(std::vector<Outbound> out);
  void drop(std::uint32_t id);
  std::shared_ptr<Conn> find(std::uint32_t id);
  void install_routes();

  std::unique_ptr<Engine> engine_;
  ServerOptions options_;
  std::unique_ptr<httplib::Server> http_;
  std::ofstream log_file_;
  int port_ = 0;

  std::mutex engine_mutex_;
  std::mutex conn_mutex_;
  std::condition_variable conn_cv_;
  std::map<std::uint32_t, std::shared_ptr<Conn>> conns_;

  std::mutex state_mutex_;
  std::condition_variable state_cv_;
  std::atomic<bool> running_{false};
  bool stopped_ = false;
  std::thread http_thread_;
  std::thread tick_thread_;
};

}  // namespace gesteach
