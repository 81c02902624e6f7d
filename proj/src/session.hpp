#pragma once

// Teach session: B-button capture, routing of windows to recognizers or the
// posture detector, the confidence-gated command channel, waypoints and
// program runs. Single-threaded; the caller serialises all events.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "force_guard.hpp"
#include "mlp.hpp"
#include "program.hpp"
#include "robot_sim.hpp"
#include "stat_recognizer.hpp"

namespace gesteach {

enum class Verb { MotorsOn, MotorsOff, MoveLine, SetSpeed, Mode, GuardReset, Generate, Run };

struct CommandEvent {
  Verb verb = Verb::MoveLine;
  double argument = 0.0;  // SET SPEED value or MODE number
  double confidence = 1.0;
  std::int64_t t_ms = 0;
};

/// Parses the closed grammar. Tokens are separated by runs of spaces.
/// UnknownVerb for anything else; InvalidArgument for a non-positive speed.
CommandEvent parse_command(const std::string& text);
std::string command_text(const CommandEvent& ev);

enum class EffectKind { VibrateOn, VibrateOff, Stop, Move, Rejected, Notice, Waypoint, Program };

const char* effect_kind_name(EffectKind k);

struct SessionEffect {
  EffectKind kind = EffectKind::Notice;
  std::int64_t t_ms = 0;
  std::string reason;  // Stop: release|guard|watchdog|motors_off; Notice: error code or event
  std::string text;    // Notice message, Rejected command, Program text
  PoseIncrement increment;  // Move
  double value = 0.0;       // Rejected: confidence; Waypoint: index
};

struct RecognitionRecord {
  std::string label;  // class label, posture name or NoMotion
  double confidence = 0.0;
  std::string source;  // ann | stat | posture | direction
  std::int64_t t_ms = 0;
  bool acted = false;
};

enum class CommandOutcome { Accepted, Rejected, Failed };

struct Recognizers {
  std::optional<StatModel> stat;
  std::optional<MlpModel> ann;
};

class TeachSession {
 public:
  /// Throws InvalidArgument when a stat model's method contradicts the
  /// configured recognizer.
  TeachSession(SessionConfig config, RobotProfile profile, Recognizers models = {});

  void button(bool pressed, std::int64_t t_ms);
  /// Forgets a held B without stopping: the watchdog decides what happens
  /// to a move whose operator vanished.
  void abandon_hold();
  /// Throws ClockError when t_ms does not increase within a capture.
  void sample(const AccelSample& s);
  /// Throws UnknownVerb / InvalidArgument for bad input; operational failures
  /// become Notice effects and return Failed.
  CommandOutcome command(const std::string& text, double confidence, std::int64_t t_ms);
  CommandOutcome command(const CommandEvent& ev);

  /// One simulation step ending at now_ms: motion, force guard, program run.
  void tick(std::int64_t now_ms);
  /// Stops a move when the heartbeat gap exceeds timeout_ms.
  bool watchdog(std::int64_t now_ms, std::int64_t last_heartbeat_ms, std::int64_t timeout_ms);

  std::vector<SessionEffect> take_effects();

  const RobotSim& sim() const { return sim_; }
  const GuardState& guard() const { return guard_; }
  const ForceReading& last_force() const { return force_; }
  const SessionConfig& config() const { return config_; }
  const RobotProfile& profile() const { return profile_; }
  int mode() const { return config_.mode; }
  const MotionSpeed& speed() const { return speed_; }
  const std::vector<Waypoint>& waypoints() const { return waypoints_; }
  const std::optional<RobotProgram>& program() const { return program_; }
  const std::optional<RecognitionRecord>& last_recognition() const { return recognition_; }
  bool capturing() const { return capture_ && !handled_; }
  bool program_running() const { return runner_.has_value(); }
  /// Wall-clock milliseconds from the arrival of the window-completing
  /// sample to start_move, for the most recent gesture-driven move.
  std::optional<double> last_latency_ms() const { return latency_ms_; }
  std::size_t moves_this_hold() const { return moves_this_hold_; }

 private:
  void on_window(std::int64_t t_ms);
  void decide_dynamic(const GestureWindow& first4, std::int64_t t_ms);
  void decide_mode2(const GestureWindow& first4, std::int64_t t_ms);
  void act_on_class(GestureClass cls, double confidence, const std::string& source,
                    std::int64_t t_ms);
  bool issue_move(const PoseIncrement& inc, std::int64_t t_ms);
  void notice(const std::string& reason, const std::string& text, std::int64_t t_ms);
  void record(const std::string& label, double confidence, const std::string& source,
              std::int64_t t_ms, bool acted);
  void emit(SessionEffect e) { effects_.push_back(std::move(e)); }
  GestureWindow first_four() const;

  SessionConfig config_;
  RobotProfile profile_;
  Recognizers models_;
  ForceThresholds thresholds_;
  RobotSim sim_;
  MotionSpeed speed_;
  GuardState guard_;
  ForceReading tare_;
  ForceReading force_;

  bool pressed_ = false;
  bool capture_ = false;
  bool handled_ = false;
  bool awaiting_crossing_ = false;
  std::size_t moves_this_hold_ = 0;
  std::vector<AccelSample> buffer_;
  std::int64_t window_started_ns_ = 0;

  std::vector<Waypoint> waypoints_;
  std::optional<RobotProgram> program_;
  std::optional<ProgramRunner> runner_;
  std::optional<RecognitionRecord> recognition_;
  std::optional<double> latency_ms_;
  std::vector<SessionEffect> effects_;
};

}  // namespace gesteach
