#pragma once

// Contact-force supervision: vibrate the controller when any force/torque
// component reaches the alert level, stop the robot when it reaches the
// stop level alert * (1 + p).

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace gesteach {

enum class FtAxis : int { Fx = 0, Fy, Fz, Tx, Ty, Tz };

const char* ft_axis_name(FtAxis a);

struct ForceReading {
  double fx = 0.0, fy = 0.0, fz = 0.0;  // N
  double tx = 0.0, ty = 0.0, tz = 0.0;  // N*m
  std::int64_t t_ms = 0;

  std::array<double, 6> components() const { return {fx, fy, fz, tx, ty, tz}; }
  ForceReading minus(const ForceReading& tare) const;
};

/// One alert level for forces, one for torques, and a shared fraction p.
class ForceThresholds {
 public:
  /// Throws InvalidArgument unless the alert levels are > 0 and p is in [0, 1].
  ForceThresholds(double force_alert, double p, std::optional<double> torque_alert = std::nullopt);

  double force_alert() const { return force_alert_; }
  double torque_alert() const { return torque_alert_; }
  double p() const { return p_; }
  double force_stop() const { return force_alert_ * (1.0 + p_); }
  double torque_stop() const { return torque_alert_ * (1.0 + p_); }

  double alert_for(FtAxis a) const { return static_cast<int>(a) < 3 ? force_alert_ : torque_alert_; }
  double stop_for(FtAxis a) const { return static_cast<int>(a) < 3 ? force_stop() : torque_stop(); }

 private:
  double force_alert_;
  double torque_alert_;
  double p_;
};

enum class GuardPhase { Normal, Alert, Stopped };

const char* guard_phase_name(GuardPhase p);

struct GuardState {
  GuardPhase phase = GuardPhase::Normal;
  std::optional<FtAxis> offending;
};

enum class GuardEffect { VibrateOn, VibrateOff, StopRobot };

const char* guard_effect_name(GuardEffect e);

struct GuardUpdate {
  GuardState state;
  std::vector<GuardEffect> effects;
};

/// One reading through the Normal/Alert/Stopped machine. Stopped absorbs
/// every reading until reset_guard. Components are compared on absolute
/// value; the reading is expected to be tared already.
GuardUpdate update_guard(const GuardState& state, const ForceReading& reading,
                         const ForceThresholds& th);

/// Stopped -> Normal. NotStopped from any other phase.
GuardState reset_guard(const GuardState& state);

}  // namespace gesteach
