#pragma once

// Wire protocol engine: line-delimited JSON messages in, Telemetry / Effect /
// Error lines out, all on a virtual clock that advances one tick per step().
// Live serving and log replay drive the same engine, so a recorded session
// replays to the same transcript.

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "session.hpp"

namespace gesteach {

inline constexpr const char* kLogFormat = "gesteach-session-log";

struct Outbound {
  std::optional<std::uint32_t> to;  // nullopt: broadcast to every connection
  std::string line;                 // no trailing newline
};

class Engine {
 public:
  Engine(SessionConfig config, RobotProfile profile, Recognizers models = {});

  /// Connection ids are handed out in order from 1. The connect itself is
  /// queued like a message.
  std::uint32_t connect();
  void disconnect(std::uint32_t conn);
  void submit(std::uint32_t conn, std::string line);

  /// Advances the clock by one tick: drain queued input stamped with the new
  /// time, tick the simulation and guard, run the watchdog, then broadcast
  /// Effects and one Telemetry line.
  void step();
  std::int64_t now() const { return now_ms_; }
  std::int64_t tick_ms() const { return session_.config().tick_ms; }
  std::int64_t watchdog_timeout_ms() const { return timeout_ms_; }

  std::vector<Outbound> take_output();
  /// Telemetry and Effect lines, newline-terminated, when keep_transcript.
  const std::string& transcript() const { return transcript_; }
  void keep_transcript(bool on) { keep_transcript_ = on; }

  /// Writes the log header; must precede the first step. Every drained
  /// ingress event is appended until finish_recording writes the end mark.
  void start_recording(std::ostream& out);
  void finish_recording();

  TeachSession& session() { return session_; }
  const TeachSession& session() const { return session_; }
  std::optional<std::uint32_t> operator_connection() const { return operator_; }
  std::int64_t last_heartbeat_ms() const { return last_heartbeat_ms_; }

 private:
  enum class IngressKind { Connect, Disconnect, Line };
  struct Ingress {
    IngressKind kind;
    std::uint32_t conn;
    std::string line;
  };
  struct Peer {
    std::optional<std::int64_t> last_seq;
    bool hello = false;
    bool observer = false;
  };

  void process(const Ingress& in);
  void handle_line(std::uint32_t conn, Peer& peer, const std::string& line);
  void reply_error(std::uint32_t conn, ErrorCode code, const std::string& message,
                   std::optional<std::int64_t> in_reply_to = std::nullopt);
  void broadcast(nlohmann::ordered_json msg, bool golden);
  void emit_effects();
  void emit_telemetry();
  void log(const nlohmann::ordered_json& entry);

  TeachSession session_;
  nlohmann::ordered_json log_header_;
  std::int64_t now_ms_ = 0;
  std::int64_t timeout_ms_;
  std::int64_t last_heartbeat_ms_ = 0;
  std::int64_t out_seq_ = 0;
  std::uint32_t next_conn_ = 1;
  std::optional<std::uint32_t> operator_;
  std::map<std::uint32_t, Peer> peers_;
  std::deque<Ingress> ingress_;
  std::vector<Outbound> out_;
  std::string transcript_;
  bool keep_transcript_ = true;
  bool stepped_ = false;
  std::ostream* recorder_ = nullptr;
};

struct ReplayOutput {
  std::string transcript;
  std::optional<std::string> program_text;
  std::int64_t end_ms = 0;
  std::size_t messages = 0;
};

/// Replays a recorded log. pace = 0 runs flat out; pace = k sleeps
/// tick/k of wall time per tick. ParseError (with the byte offset) on a
/// malformed or truncated log.
ReplayOutput replay_log(const std::string& log_text, double pace = 0.0);

/// Builds a log in memory, for scripted sessions and tests.
class ScriptedSession {
 public:
  ScriptedSession(SessionConfig config, RobotProfile profile, Recognizers models = {});
  Engine& engine() { return *engine_; }
  std::uint32_t connect_operator();
  void send(std::uint32_t conn, const nlohmann::json& msg);
  void heartbeat(std::uint32_t conn);
  /// Steps n ticks, sending a heartbeat before each one when requested.
  void run(std::size_t ticks, std::optional<std::uint32_t> heartbeat_conn = std::nullopt);
  std::string finish();  // writes the end mark and returns the log text

 private:
  std::unique_ptr<Engine> engine_;
  std::ostringstream log_;
  std::map<std::uint32_t, std::int64_t> seq_;
};

}  // namespace gesteach
