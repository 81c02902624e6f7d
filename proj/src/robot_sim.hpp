#pragma once

// Simulated controller: one outstanding incremental linear move, executed by
// discrete ticks, with a virtual contact plane producing Fz.

#include <cstdint>
#include <optional>

#include "force_guard.hpp"
#include "workspace.hpp"

namespace gesteach {

struct MotionSpeed {
  double linear_mm_s = 75.0;
  double angular_deg_s = 20.0;
};

struct ContactSurface {
  double z_s = -1e9;       // plane height, mm; far below by default
  double stiffness = 0.0;  // N/mm
  double tool_weight = 0.0;  // N, constant Fz bias while free
};

enum class MotionPhase { Idle, Moving };

const char* motion_phase_name(MotionPhase p);

class RobotSim {
 public:
  RobotSim(Workspace ws, Pose home, ContactSurface contact = {});

  const Pose& pose() const { return pose_; }
  const Workspace& workspace() const { return ws_; }
  const ContactSurface& contact() const { return contact_; }
  MotionPhase phase() const { return move_ ? MotionPhase::Moving : MotionPhase::Idle; }
  std::optional<Pose> target() const;
  bool motors_on() const { return motors_on_; }

  void set_motors(bool on);
  void set_contact(const ContactSurface& c) { contact_ = c; }

  /// Replaces any current move (latest wins). A zero increment leaves the
  /// robot Idle. Throws MotorsOff, InvalidArgument for non-positive speed.
  void start_move(const PoseIncrement& inc, const MotionSpeed& speed);

  /// Freezes the pose where it is; no-op while Idle.
  void stop_move();

  /// Advances the move by dt_ms and returns the F/T reading at the new pose.
  /// A move that would leave the field of operation halts on its boundary.
  ForceReading tick(std::int64_t dt_ms, std::int64_t now_ms = 0);

  /// Stops a move when now - last_heartbeat exceeds timeout. Returns true
  /// when it stopped something.
  bool watchdog(std::int64_t now_ms, std::int64_t last_heartbeat_ms, std::int64_t timeout_ms);

  ForceReading sense(std::int64_t now_ms = 0) const;

 private:
  struct Move {
    Pose start;
    PoseIncrement inc;
    double duration_ms = 0.0;
    double elapsed_ms = 0.0;
  };

  Pose interpolate(const Move& m, double elapsed_ms) const;

  Workspace ws_;
  Pose pose_;
  ContactSurface contact_;
  bool motors_on_ = true;
  std::optional<Move> move_;
};

}  // namespace gesteach
