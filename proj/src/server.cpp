#include "server.hpp"

#include <charconv>
#include <chrono>

#include <httplib.h>

#include "error.hpp"

namespace gesteach {

namespace {

constexpr int kWorkerThreads = 32;

std::optional<std::uint32_t> conn_param(const httplib::Request& req) {
  if (!req.has_param("conn")) return std::nullopt;
  const auto v = req.get_param_value("conn");
  std::uint32_t id = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), id);
  if (ec != std::errc() || ptr != v.data() + v.size()) return std::nullopt;
  return id;
}

void json_reply(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump() + "\n", "application/json");
}

}  // namespace

std::pair<std::string, int> parse_endpoint(const std::string& endpoint) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == endpoint.size()) {
    throw Error(ErrorCode::InvalidArgument, "endpoint must look like host:port, got '" + endpoint + "'");
  }
  int port = -1;
  const auto* b = endpoint.data() + colon + 1;
  const auto* e = endpoint.data() + endpoint.size();
  auto [ptr, ec] = std::from_chars(b, e, port);
  if (ec != std::errc() || ptr != e || port < 0 || port > 65535) {
    throw Error(ErrorCode::InvalidArgument, "bad port in endpoint '" + endpoint + "'");
  }
  return {endpoint.substr(0, colon), port};
}

GatewayServer::GatewayServer(std::unique_ptr<Engine> engine, ServerOptions options)
    : engine_(std::move(engine)), options_(std::move(options)) {
  if (!engine_) throw Error(ErrorCode::InvalidArgument, "server needs an engine");
  engine_->keep_transcript(options_.keep_transcript);
}

GatewayServer::~GatewayServer() { stop(); }

std::shared_ptr<GatewayServer::Conn> GatewayServer::find(std::uint32_t id) {
  std::lock_guard lk(conn_mutex_);
  auto it = conns_.find(id);
  if (it == conns_.end() || it->second->closed) return nullptr;
  return it->second;
}

void GatewayServer::drop(std::uint32_t id) {
  {
    std::lock_guard lk(conn_mutex_);
    auto it = conns_.find(id);
    if (it == conns_.end() || it->second->closed) return;
    it->second->closed = true;
    conns_.erase(it);
  }
  conn_cv_.notify_all();
  std::lock_guard lk(engine_mutex_);
  engine_->disconnect(id);
}

void GatewayServer::install_routes() {
  auto& s = *http_;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                         {"Access-Control-Allow-Headers", "Content-Type"}});
  s.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  s.Post("/connect", [this](const httplib::Request&, httplib::Response& res) {
    std::uint32_t id = 0;
    {
      std::lock_guard lk(engine_mutex_);
      id = engine_->connect();
    }
    {
      std::lock_guard lk(conn_mutex_);
      conns_[id] = std::make_shared<Conn>();
    }
    json_reply(res, 200, {{"conn", id}});
  });

  s.Post("/send", [this](const httplib::Request& req, httplib::Response& res) {
    const auto id = conn_param(req);
    if (!id || !find(*id)) {
      json_reply(res, 404, {{"error", "unknown connection"}});
      return;
    }
    std::size_t n = 0;
    {
      std::lock_guard lk(engine_mutex_);
      std::size_t pos = 0;
      const std::string& body = req.body;
      while (pos < body.size()) {
        auto nl = body.find('\n', pos);
        if (nl == std::string::npos) nl = body.size();
        std::string line = body.substr(pos, nl - pos);
        pos = nl + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        engine_->submit(*id, std::move(line));
        ++n;
      }
    }
    json_reply(res, 202, {{"accepted", n}});
  });

  s.Post("/disconnect", [this](const httplib::Request& req, httplib::Response& res) {
    const auto id = conn_param(req);
    if (!id || !find(*id)) {
      json_reply(res, 404, {{"error", "unknown connection"}});
      return;
    }
    drop(*id);
    json_reply(res, 200, {{"closed", *id}});
  });

  s.Get("/stream", [this](const httplib::Request& req, httplib::Response& res) {
    const auto id = conn_param(req);
    auto conn = id ? find(*id) : nullptr;
    if (!conn) {
      json_reply(res, 404, {{"error", "unknown connection"}});
      return;
    }
    {
      std::lock_guard lk(conn_mutex_);
      if (conn->streaming) {
        json_reply(res, 409, {{"error", "connection already has a stream"}});
        return;
      }
      conn->streaming = true;
    }
    res.set_header("Cache-Control", "no-cache");
    const std::uint32_t cid = *id;
    res.set_chunked_content_provider(
        "text/event-stream",
        [this, conn](std::size_t, httplib::DataSink& sink) {
          std::deque<std::string> batch;
          {
            std::unique_lock lk(conn_mutex_);
            conn_cv_.wait_for(lk, std::chrono::milliseconds(100), [&] {
              return !conn->queue.empty() || conn->closed || !running_;
            });
            if (conn->closed || !running_) {
              lk.unlock();
              sink.done();
              return true;
            }
            batch.swap(conn->queue);
          }
          for (const auto& line : batch) {
            const std::string frame = "data: " + line + "\n\n";
            if (!sink.write(frame.data(), frame.size())) return false;
          }
          return true;
        },
        [this, cid](bool) { drop(cid); });
  });

  s.Get("/program", [this](const httplib::Request&, httplib::Response& res) {
    if (auto text = program_text()) {
      res.set_content(*text, "text/plain");
    } else {
      json_reply(res, 404, {{"error", "no program generated"}});
    }
  });

  s.Get("/status", [this](const httplib::Request&, httplib::Response& res) {
    nlohmann::json body;
    {
      std::lock_guard lk(engine_mutex_);
      body["t_ms"] = engine_->now();
      const auto op = engine_->operator_connection();
      body["operator"] = op ? nlohmann::json(*op) : nlohmann::json();
    }
    {
      std::lock_guard lk(conn_mutex_);
      body["connections"] = conns_.size();
    }
    json_reply(res, 200, body);
  });
}

void GatewayServer::start() {
  if (running_) return;
  const auto [host, port] = parse_endpoint(options_.endpoint);
  if (options_.record_path) {
    log_file_.open(*options_.record_path, std::ios::binary | std::ios::trunc);
    if (!log_file_) {
      throw Error(ErrorCode::IoError, "cannot write session log " + options_.record_path->string());
    }
    engine_->start_recording(log_file_);
  }
  http_ = std::make_unique<httplib::Server>();
  http_->new_task_queue = [] { return new httplib::ThreadPool(kWorkerThreads); };
  // httplib's default adds SO_REUSEPORT, which lets a second gateway share the port
  http_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  install_routes();
  const int bound = port == 0 ? http_->bind_to_any_port(host) : (http_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorCode::BindFailure, "cannot bind " + options_.endpoint);
  }
  port_ = bound;
  running_ = true;
  http_thread_ = std::thread([this] { http_->listen_after_bind(); });
  tick_thread_ = std::thread([this] { tick_loop(); });
  http_->wait_until_ready();
}

void GatewayServer::tick_loop() {
  const auto tick = std::chrono::milliseconds(engine_->tick_ms());
  auto next = std::chrono::steady_clock::now();
  while (running_) {
    next += tick;
    std::this_thread::sleep_until(next);
    std::vector<Outbound> out;
    {
      std::lock_guard lk(engine_mutex_);
      engine_->step();
      out = engine_->take_output();
    }
    distribute(std::move(out));
  }
}

void GatewayServer::distribute(std::vector<Outbound> out) {
  std::vector<std::uint32_t> overflow;
  {
    std::lock_guard lk(conn_mutex_);
    auto push = [&](std::uint32_t id, Conn& c, const std::string& line) {
      if (c.closed) return;
      if (c.queue.size() >= options_.max_queued_lines) {
        overflow.push_back(id);
        return;
      }
      c.queue.push_back(line);
    };
    for (const auto& o : out) {
      if (o.to) {
        auto it = conns_.find(*o.to);
        if (it != conns_.end()) push(it->first, *it->second, o.line);
      } else {
        for (auto& [id, c] : conns_) push(id, *c, o.line);
      }
    }
  }
  conn_cv_.notify_all();
  // Slow readers are cut loose, not buffered without bound.
  for (const auto id : overflow) drop(id);
}

void GatewayServer::stop() {
  if (running_.exchange(false)) {
    conn_cv_.notify_all();
    if (tick_thread_.joinable()) tick_thread_.join();
    http_->stop();
    if (http_thread_.joinable()) http_thread_.join();
    std::lock_guard lk(engine_mutex_);
    engine_->finish_recording();
    if (log_file_.is_open()) log_file_.close();
  }
  {
    std::lock_guard lk(state_mutex_);
    stopped_ = true;
  }
  state_cv_.notify_all();
}

bool GatewayServer::wait_for(std::int64_t timeout_ms) {
  std::unique_lock lk(state_mutex_);
  return state_cv_.wait_for(lk, std::chrono::milliseconds(timeout_ms), [&] { return stopped_; });
}

std::int64_t GatewayServer::now_ms() {
  std::lock_guard lk(engine_mutex_);
  return engine_->now();
}

std::optional<std::string> GatewayServer::program_text() {
  std::lock_guard lk(engine_mutex_);
  if (const auto& p = engine_->session().program()) return gesteach::program_text(*p);
  return std::nullopt;
}

std::string GatewayServer::transcript() {
  std::lock_guard lk(engine_mutex_);
  return engine_->transcript();
}

}  // namespace gesteach
