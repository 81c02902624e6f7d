#include "force_guard.hpp"

#include <cmath>

#include "error.hpp"

namespace gesteach {

const char* ft_axis_name(FtAxis a) {
  static constexpr const char* kNames[] = {"fx", "fy", "fz", "tx", "ty", "tz"};
  return kNames[static_cast<int>(a)];
}

ForceReading ForceReading::minus(const ForceReading& tare) const {
  return {fx - tare.fx, fy - tare.fy, fz - tare.fz, tx - tare.tx, ty - tare.ty, tz - tare.tz, t_ms};
}

ForceThresholds::ForceThresholds(double force_alert, double p, std::optional<double> torque_alert)
    : force_alert_(force_alert), torque_alert_(torque_alert.value_or(force_alert)), p_(p) {
  if (!(force_alert_ > 0.0) || !(torque_alert_ > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "alert levels must be > 0");
  }
  if (!(p_ >= 0.0 && p_ <= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must lie in [0, 1]");
}

const char* guard_phase_name(GuardPhase p) {
  switch (p) {
    case GuardPhase::Normal: return "Normal";
    case GuardPhase::Alert: return "Alert";
    case GuardPhase::Stopped: return "Stopped";
  }
  return "Normal";
}

const char* guard_effect_name(GuardEffect e) {
  switch (e) {
    case GuardEffect::VibrateOn: return "VibrateOn";
    case GuardEffect::VibrateOff: return "VibrateOff";
    case GuardEffect::StopRobot: return "StopRobot";
  }
  return "Stop";
}

GuardUpdate update_guard(const GuardState& state, const ForceReading& reading,
                         const ForceThresholds& th) {
  GuardUpdate out{state, {}};
  if (state.phase == GuardPhase::Stopped) return out;

  // Worst component relative to its own alert level (forces and torques have
  // different units and thresholds).
  const auto c = reading.components();
  std::optional<FtAxis> over_stop;
  std::optional<FtAxis> over_alert;
  for (int i = 0; i < 6; ++i) {
    const auto axis = static_cast<FtAxis>(i);
    const double m = std::abs(c[static_cast<std::size_t>(i)]);
    if (!over_stop && m >= th.stop_for(axis)) over_stop = axis;
    if (!over_alert && m >= th.alert_for(axis)) over_alert = axis;
  }

  if (over_stop) {
    out.state = {GuardPhase::Stopped, over_stop};
    // A reading past the stop level is past the alert level too.
    if (state.phase == GuardPhase::Normal) out.effects.push_back(GuardEffect::VibrateOn);
    out.effects.push_back(GuardEffect::StopRobot);
    out.effects.push_back(GuardEffect::VibrateOff);
  } else if (state.phase == GuardPhase::Normal && over_alert) {
    out.state = {GuardPhase::Alert, over_alert};
    out.effects = {GuardEffect::VibrateOn};
  } else if (state.phase == GuardPhase::Alert && !over_alert) {
    out.state = {GuardPhase::Normal, std::nullopt};
    out.effects = {GuardEffect::VibrateOff};
  } else if (state.phase == GuardPhase::Alert) {
    out.state.offending = over_alert;
  }
  return out;
}

GuardState reset_guard(const GuardState& state) {
  if (state.phase != GuardPhase::Stopped) {
    throw Error(ErrorCode::NotStopped, "guard reset is only valid after a stop");
  }
  return {};
}

}  // namespace gesteach
