#include "robot_sim.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace gesteach {

const char* motion_phase_name(MotionPhase p) {
  return p == MotionPhase::Moving ? "Moving" : "Idle";
}

RobotSim::RobotSim(Workspace ws, Pose home, ContactSurface contact)
    : ws_(ws), pose_(home), contact_(contact) {
  ws_.validate();
  if (!ws_.contains(pose_.position())) {
    throw Error(ErrorCode::Degenerate, "home pose lies outside the field of operation");
  }
}

std::optional<Pose> RobotSim::target() const {
  if (!move_) return std::nullopt;
  return apply(move_->start, move_->inc);
}

void RobotSim::set_motors(bool on) {
  motors_on_ = on;
  if (!on) move_.reset();
}

void RobotSim::start_move(const PoseIncrement& inc, const MotionSpeed& speed) {
  if (!motors_on_) throw Error(ErrorCode::MotorsOff, "robot motors are off");
  if (!(speed.linear_mm_s > 0.0) || !(speed.angular_deg_s > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "speed must be positive");
  }
  if (inc.is_zero()) {
    move_.reset();
    return;
  }
  const double linear = norm(inc.translation());
  const double angular =
      std::max({std::abs(inc.i[3]), std::abs(inc.i[4]), std::abs(inc.i[5])});
  const double duration_s = std::max(linear / speed.linear_mm_s, angular / speed.angular_deg_s);
  move_ = Move{pose_, inc, duration_s * 1000.0, 0.0};
}

void RobotSim::stop_move() { move_.reset(); }

Pose RobotSim::interpolate(const Move& m, double elapsed_ms) const {
  if (elapsed_ms >= m.duration_ms) return apply(m.start, m.inc);
  const double f = elapsed_ms / m.duration_ms;
  PoseIncrement part;
  for (std::size_t k = 0; k < 6; ++k) part.i[k] = m.inc.i[k] * f;
  return apply(m.start, part);
}

ForceReading RobotSim::tick(std::int64_t dt_ms, std::int64_t now_ms) {
  if (dt_ms <= 0) throw Error(ErrorCode::InvalidArgument, "tick needs dt > 0");
  if (move_) {
    Move& m = *move_;
    const double from = m.elapsed_ms;
    const double to = std::min(m.duration_ms, from + static_cast<double>(dt_ms));
    const Pose next = interpolate(m, to);
    if (ws_.contains(next.position())) {
      pose_ = next;
      m.elapsed_ms = to;
      if (to >= m.duration_ms) move_.reset();
    } else {
      // Halt on the boundary: bisect for the last in-shell instant.
      double lo = from;
      double hi = to;
      for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (ws_.contains(interpolate(m, mid).position())) lo = mid; else hi = mid;
      }
      pose_ = interpolate(m, lo);
      move_.reset();
    }
  }
  return sense(now_ms);
}

bool RobotSim::watchdog(std::int64_t now_ms, std::int64_t last_heartbeat_ms,
                        std::int64_t timeout_ms) {
  if (move_ && now_ms - last_heartbeat_ms > timeout_ms) {
    stop_move();
    return true;
  }
  return false;
}

ForceReading RobotSim::sense(std::int64_t now_ms) const {
  ForceReading r;
  r.t_ms = now_ms;
  r.fz = contact_.tool_weight + contact_.stiffness * std::max(0.0, contact_.z_s - pose_.z);
  return r;
}

}  // namespace gesteach
