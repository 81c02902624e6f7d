#include "engine.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "error.hpp"

namespace gesteach {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::size_t kMaxLineBytes = 64 * 1024;

ordered_json pose_array(const Pose& p) { return {p.x, p.y, p.z, p.rx, p.ry, p.rz}; }

bool is_number(const json& j, const char* key) {
  auto it = j.find(key);
  return it != j.end() && it->is_number() && std::isfinite(it->get<double>());
}

}  // namespace

Engine::Engine(SessionConfig config, RobotProfile profile, Recognizers models)
    : session_(config, profile, models), timeout_ms_(config.watchdog_timeout_ms) {
  log_header_ = {{"format", kLogFormat},
                 {"version", 1},
                 {"config", session_config_to_json(config)},
                 {"profile", profile_to_json(profile)},
                 {"models",
                  {{"stat", models.stat ? json::parse(stat_model_to_json(*models.stat)) : json()},
                   {"ann", models.ann ? json::parse(mlp_model_to_json(*models.ann)) : json()}}}};
}

std::uint32_t Engine::connect() {
  const std::uint32_t id = next_conn_++;
  ingress_.push_back({IngressKind::Connect, id, {}});
  return id;
}

void Engine::disconnect(std::uint32_t conn) {
  ingress_.push_back({IngressKind::Disconnect, conn, {}});
}

void Engine::submit(std::uint32_t conn, std::string line) {
  ingress_.push_back({IngressKind::Line, conn, std::move(line)});
}

std::vector<Outbound> Engine::take_output() {
  std::vector<Outbound> out;
  out.swap(out_);
  return out;
}

void Engine::start_recording(std::ostream& out) {
  if (stepped_) throw Error(ErrorCode::InvalidArgument, "recording must start before the first tick");
  recorder_ = &out;
  *recorder_ << log_header_.dump() << '\n';
  recorder_->flush();
}

void Engine::finish_recording() {
  if (!recorder_) return;
  // Input still queued has not been seen by the session; it stays out of
  // the log too.
  *recorder_ << json{{"end", now_ms_}}.dump() << '\n';
  recorder_->flush();
  recorder_ = nullptr;
}

void Engine::log(const ordered_json& entry) {
  if (!recorder_) return;
  *recorder_ << entry.dump() << '\n';
  recorder_->flush();
}

void Engine::step() {
  stepped_ = true;
  now_ms_ += tick_ms();
  while (!ingress_.empty()) {
    Ingress in = std::move(ingress_.front());
    ingress_.pop_front();
    process(in);
  }
  session_.tick(now_ms_);
  session_.watchdog(now_ms_, last_heartbeat_ms_, timeout_ms_);
  emit_effects();
  emit_telemetry();
}

void Engine::process(const Ingress& in) {
  switch (in.kind) {
    case IngressKind::Connect:
      log({{"at", now_ms_}, {"conn", in.conn}, {"event", "connect"}});
      peers_[in.conn] = Peer{};
      return;
    case IngressKind::Disconnect: {
      log({{"at", now_ms_}, {"conn", in.conn}, {"event", "disconnect"}});
      peers_.erase(in.conn);
      if (operator_ == in.conn) {
        operator_.reset();
        session_.abandon_hold();
      }
      return;
    }
    case IngressKind::Line: {
      log({{"at", now_ms_}, {"conn", in.conn}, {"line", in.line}});
      auto it = peers_.find(in.conn);
      if (it == peers_.end()) return;  // sender already gone
      handle_line(in.conn, it->second, in.line);
      emit_effects();
      return;
    }
  }
}

void Engine::reply_error(std::uint32_t conn, ErrorCode code, const std::string& message,
                         std::optional<std::int64_t> in_reply_to) {
  ordered_json msg = {{"kind", "Error"},
                      {"seq", ++out_seq_},
                      {"t_ms", now_ms_},
                      {"code", error_code_name(code)},
                      {"message", message},
                      {"in_reply_to", in_reply_to ? ordered_json(*in_reply_to) : ordered_json()}};
  out_.push_back({conn, msg.dump()});
}

void Engine::broadcast(ordered_json msg, bool golden) {
  std::string line = msg.dump();
  if (golden && keep_transcript_) {
    transcript_ += line;
    transcript_ += '\n';
  }
  out_.push_back({std::nullopt, std::move(line)});
}

void Engine::handle_line(std::uint32_t conn, Peer& peer, const std::string& line) {
  if (line.size() > kMaxLineBytes) {
    reply_error(conn, ErrorCode::ParseError, "line exceeds 64 KiB");
    return;
  }
  json msg;
  try {
    msg = json::parse(line);
  } catch (const json::parse_error& e) {
    reply_error(conn, ErrorCode::ParseError, std::string("malformed frame: ") + e.what());
    return;
  }
  if (!msg.is_object() || !msg.contains("kind") || !msg["kind"].is_string()) {
    reply_error(conn, ErrorCode::ParseError, "frame needs a string 'kind'");
    return;
  }
  if (!msg.contains("seq") || !msg["seq"].is_number_integer()) {
    reply_error(conn, ErrorCode::ParseError, "frame needs an integer 'seq'");
    return;
  }
  const auto seq = msg["seq"].get<std::int64_t>();
  const auto kind = msg["kind"].get<std::string>();
  // rejected frames do not consume a sequence number
  if (kind != "Hello" && kind != "InputSample" && kind != "ButtonEdge" && kind != "Command" &&
      kind != "Heartbeat" && kind != "Telemetry" && kind != "Effect" && kind != "Error") {
    reply_error(conn, ErrorCode::ParseError, "unknown kind '" + kind + "'", seq);
    return;
  }
  if (peer.last_seq && seq <= *peer.last_seq) {
    reply_error(conn, ErrorCode::InvalidArgument,
                "seq " + std::to_string(seq) + " does not follow " + std::to_string(*peer.last_seq),
                seq);
    return;
  }
  peer.last_seq = seq;

  if (kind == "Telemetry" || kind == "Effect" || kind == "Error") {
    reply_error(conn, ErrorCode::InvalidArgument, kind + " is an outbound-only kind", seq);
    return;
  }
  if (kind == "Hello") {
    if (peer.hello) {
      reply_error(conn, ErrorCode::InvalidArgument, "duplicate Hello", seq);
      return;
    }
    const auto role = msg.value("role", std::string());
    if (role == "observer") {
      peer.hello = true;
      peer.observer = true;
    } else if (role == "operator") {
      if (operator_) {
        reply_error(conn, ErrorCode::InvalidArgument, "another operator is connected", seq);
        return;
      }
      peer.hello = true;
      operator_ = conn;
      last_heartbeat_ms_ = now_ms_;
    } else {
      reply_error(conn, ErrorCode::InvalidArgument, "role must be operator or observer", seq);
    }
    return;
  }
  if (!peer.hello) {
    reply_error(conn, ErrorCode::InvalidArgument, "send Hello first", seq);
    return;
  }
  if (operator_ != conn) {
    reply_error(conn, ErrorCode::InvalidArgument, "observer connections are read-only", seq);
    return;
  }

  try {
    if (kind == "Heartbeat") {
      last_heartbeat_ms_ = now_ms_;
    } else if (kind == "ButtonEdge") {
      if (!msg.contains("pressed") || !msg["pressed"].is_boolean()) {
        reply_error(conn, ErrorCode::ParseError, "ButtonEdge needs boolean 'pressed'", seq);
        return;
      }
      session_.button(msg["pressed"].get<bool>(), now_ms_);
    } else if (kind == "InputSample") {
      if (!msg.contains("t_ms") || !msg["t_ms"].is_number_integer() || !is_number(msg, "ax") ||
          !is_number(msg, "ay") || !is_number(msg, "az")) {
        reply_error(conn, ErrorCode::ParseError,
                    "InputSample needs integer t_ms and numeric ax, ay, az", seq);
        return;
      }
      AccelSample s;
      s.t_ms = msg["t_ms"].get<std::int64_t>();
      s.ax = msg["ax"].get<double>();
      s.ay = msg["ay"].get<double>();
      s.az = msg["az"].get<double>();
      session_.sample(s);
    } else {  // Command
      if (!msg.contains("text") || !msg["text"].is_string() || !is_number(msg, "confidence")) {
        reply_error(conn, ErrorCode::ParseError, "Command needs string text and numeric confidence",
                    seq);
        return;
      }
      session_.command(msg["text"].get<std::string>(), msg["confidence"].get<double>(), now_ms_);
    }
  } catch (const Error& e) {
    reply_error(conn, e.code(), e.what(), seq);
  }
}

void Engine::emit_effects() {
  for (const auto& e : session_.take_effects()) {
    ordered_json msg = {{"kind", "Effect"},
                        {"seq", ++out_seq_},
                        {"t_ms", now_ms_},
                        {"effect", effect_kind_name(e.kind)}};
    switch (e.kind) {
      case EffectKind::VibrateOn:
      case EffectKind::VibrateOff:
        break;
      case EffectKind::Stop:
        msg["reason"] = e.reason;
        if (!e.text.empty()) msg["axis"] = e.text;
        break;
      case EffectKind::Move:
        msg["increment"] = ordered_json(e.increment.i);
        break;
      case EffectKind::Rejected:
        msg["command"] = e.text;
        msg["confidence"] = e.value;
        break;
      case EffectKind::Notice:
        msg["reason"] = e.reason;
        msg["message"] = e.text;
        break;
      case EffectKind::Waypoint: {
        const auto index = static_cast<std::size_t>(e.value);
        msg["index"] = index;
        msg["pose"] = pose_array(session_.waypoints().at(index).pose);
        break;
      }
      case EffectKind::Program:
        msg["text"] = e.text;
        break;
    }
    broadcast(std::move(msg), true);
  }
}

void Engine::emit_telemetry() {
  const auto& s = session_;
  const auto& f = s.last_force();
  ordered_json rec;
  if (const auto& r = s.last_recognition()) {
    rec = {{"label", r->label},
           {"confidence", r->confidence},
           {"source", r->source},
           {"acted", r->acted}};
  }
  ordered_json msg = {{"kind", "Telemetry"},
                      {"seq", ++out_seq_},
                      {"t_ms", now_ms_},
                      {"pose", pose_array(s.sim().pose())},
                      {"motion", motion_phase_name(s.sim().phase())},
                      {"guard", guard_phase_name(s.guard().phase)},
                      {"force", {f.fx, f.fy, f.fz, f.tx, f.ty, f.tz}},
                      {"motors_on", s.sim().motors_on()},
                      {"mode", s.mode()},
                      {"speed", s.speed().linear_mm_s},
                      {"recognition", rec},
                      {"capturing", s.capturing()},
                      {"waypoints", s.waypoints().size()},
                      {"program", s.program_running() ? "running" : "idle"}};
  broadcast(std::move(msg), true);
}

ReplayOutput replay_log(const std::string& log_text, double pace) {
  if (!(pace >= 0.0)) throw Error(ErrorCode::InvalidArgument, "pace must be >= 0");
  std::size_t offset = 0;
  auto fail = [&](std::size_t at, const std::string& m) -> Error {
    return Error(ErrorCode::ParseError, "session log byte " + std::to_string(at) + ": " + m);
  };
  auto next_line = [&](std::string& line, std::size_t& start) {
    if (offset >= log_text.size()) return false;
    start = offset;
    const auto nl = log_text.find('\n', offset);
    if (nl == std::string::npos) {
      // A final record without its newline was cut short.
      throw fail(start, "truncated record");
    }
    line = log_text.substr(offset, nl - offset);
    offset = nl + 1;
    return true;
  };

  std::string line;
  std::size_t start = 0;
  if (!next_line(line, start)) throw fail(0, "empty log");
  std::unique_ptr<Engine> engine;
  try {
    const auto header = json::parse(line);
    if (header.at("format") != kLogFormat) throw fail(start, "not a session log");
    if (header.at("version") != 1) throw fail(start, "unsupported log version");
    Recognizers models;
    const auto& m = header.at("models");
    if (!m.at("stat").is_null()) models.stat = stat_model_from_json(m.at("stat").dump());
    if (!m.at("ann").is_null()) models.ann = mlp_model_from_json(m.at("ann").dump());
    engine = std::make_unique<Engine>(session_config_from_json(header.at("config")),
                                      profile_from_json(header.at("profile")), std::move(models));
  } catch (const json::exception& e) {
    throw fail(start, std::string("bad header: ") + e.what());
  }

  ReplayOutput out;
  const auto tick = engine->tick_ms();
  auto step = [&]() {
    engine->step();
    engine->take_output();
    if (pace > 0.0) {
      std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(
          static_cast<double>(tick) / pace));
    }
  };

  bool ended = false;
  while (next_line(line, start)) {
    if (ended) throw fail(start, "records after the end mark");
    json entry;
    try {
      entry = json::parse(line);
    } catch (const json::parse_error& e) {
      throw fail(start, e.what());
    }
    if (entry.contains("end")) {
      if (!entry["end"].is_number_integer()) throw fail(start, "bad end mark");
      const auto end = entry["end"].get<std::int64_t>();
      if (end < engine->now()) throw fail(start, "end mark precedes the last record");
      while (engine->now() < end) step();
      out.end_ms = end;
      ended = true;
      continue;
    }
    if (!entry.contains("at") || !entry["at"].is_number_integer() || !entry.contains("conn") ||
        !entry["conn"].is_number_unsigned()) {
      throw fail(start, "record needs integer 'at' and 'conn'");
    }
    const auto at = entry["at"].get<std::int64_t>();
    const auto conn = entry["conn"].get<std::uint32_t>();
    if (at <= engine->now() || at % tick != 0) {
      throw fail(start, "record time " + std::to_string(at) + " is not on a later tick");
    }
    while (engine->now() + tick < at) step();
    if (entry.contains("event")) {
      const auto ev = entry["event"].get<std::string>();
      if (ev == "connect") {
        if (engine->connect() != conn) throw fail(start, "connection ids out of order");
      } else if (ev == "disconnect") {
        engine->disconnect(conn);
      } else {
        throw fail(start, "unknown event '" + ev + "'");
      }
    } else if (entry.contains("line") && entry["line"].is_string()) {
      engine->submit(conn, entry["line"].get<std::string>());
      ++out.messages;
    } else {
      throw fail(start, "record has neither event nor line");
    }
  }
  if (!ended) throw fail(log_text.size(), "log truncated: no end mark");
  out.transcript = engine->transcript();
  if (const auto& p = engine->session().program()) out.program_text = program_text(*p);
  return out;
}

ScriptedSession::ScriptedSession(SessionConfig config, RobotProfile profile, Recognizers models)
    : engine_(std::make_unique<Engine>(std::move(config), std::move(profile), std::move(models))) {
  engine_->start_recording(log_);
}

std::uint32_t ScriptedSession::connect_operator() {
  const auto id = engine_->connect();
  send(id, {{"kind", "Hello"}, {"role", "operator"}});
  return id;
}

void ScriptedSession::send(std::uint32_t conn, const json& msg) {
  json m = msg;
  m["seq"] = ++seq_[conn];
  engine_->submit(conn, m.dump());
}

void ScriptedSession::heartbeat(std::uint32_t conn) { send(conn, {{"kind", "Heartbeat"}}); }

void ScriptedSession::run(std::size_t ticks, std::optional<std::uint32_t> heartbeat_conn) {
  for (std::size_t i = 0; i < ticks; ++i) {
    if (heartbeat_conn) heartbeat(*heartbeat_conn);
    engine_->step();
    engine_->take_output();
  }
}

std::string ScriptedSession::finish() {
  engine_->finish_recording();
  return log_.str();
}

}  // namespace gesteach
