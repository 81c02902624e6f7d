#pragma once

// Waypoints captured during teaching and the robot program built from them.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "force_guard.hpp"
#include "robot_sim.hpp"
#include "workspace.hpp"

namespace gesteach {

enum class MotionKind { Line };

struct Waypoint {
  Pose pose;
  MotionKind kind = MotionKind::Line;
  double speed_mm_s = 75.0;
  std::size_t index = 0;
};

struct MovL {
  Pose target;
  double speed_mm_s = 75.0;
  friend bool operator==(const MovL&, const MovL&) = default;
};

struct RobotProgram {
  std::string name;
  std::string profile;
  std::vector<MovL> statements;
  friend bool operator==(const RobotProgram&, const RobotProgram&) = default;
};

/// One MOVL per waypoint, in capture order. Throws EmptyProgram.
RobotProgram generate_program(const std::vector<Waypoint>& waypoints, const std::string& name,
                              const std::string& profile);

/// PROGRAM / MOVL / END text, numbers printed with 3 decimals.
std::string program_text(const RobotProgram& program);
/// Inverse of program_text. ParseError with the line number.
RobotProgram parse_program_text(const std::string& text);

/// Structured export; numbers at full precision.
std::string program_to_json(const RobotProgram& program);
RobotProgram program_from_json(const std::string& text);

/// Steps a program through the sim one statement at a time. Shared by the
/// synchronous replay and the tick-driven session.
class ProgramRunner {
 public:
  enum class Status { Running, Done, Aborted };

  explicit ProgramRunner(RobotProgram program, double angular_deg_s = 20.0)
      : program_(std::move(program)), angular_deg_s_(angular_deg_s) {}

  /// Call while the sim is Idle (or right after a tick). Starts the next
  /// statement when the previous one reached its target. Throws MotorsOff.
  Status advance(RobotSim& sim, double tolerance_mm = 1e-6);
  std::size_t next_statement() const { return next_; }
  const RobotProgram& program() const { return program_; }

 private:
  RobotProgram program_;
  double angular_deg_s_;
  std::size_t next_ = 0;
  bool segment_open_ = false;
};

struct ReplayResult {
  Pose final_pose;
  std::size_t statements_completed = 0;
  std::int64_t elapsed_ms = 0;
};

/// Runs a program to completion with the force guard watching every tick.
/// Throws MotorsOff, GuardStopped (the sim is left where it stopped).
ReplayResult replay_program(RobotSim& sim, const RobotProgram& program,
                            const ForceThresholds& thresholds, std::int64_t tick_ms = 10);

}  // namespace gesteach
