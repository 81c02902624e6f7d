#include "session.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>

#include "error.hpp"
#include "posture.hpp"
#include "trace_io.hpp"

namespace gesteach {

namespace {

std::vector<std::string> tokens(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

std::int64_t steady_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

CommandEvent parse_command(const std::string& text) {
  const auto t = tokens(text);
  auto unknown = [&]() -> Error {
    return Error(ErrorCode::UnknownVerb, "not a command: '" + text + "'");
  };
  auto is = [&](std::initializer_list<const char*> words) {
    if (t.size() != words.size()) return false;
    std::size_t i = 0;
    for (const char* w : words) {
      if (t[i++] != w) return false;
    }
    return true;
  };
  CommandEvent ev;
  if (is({"ROBOT", "MOTORS", "ON"})) {
    ev.verb = Verb::MotorsOn;
  } else if (is({"ROBOT", "MOTORS", "OFF"})) {
    ev.verb = Verb::MotorsOff;
  } else if (is({"COMPUTER", "MOVE", "LINE"})) {
    ev.verb = Verb::MoveLine;
  } else if (is({"COMPUTER", "GUARD", "RESET"})) {
    ev.verb = Verb::GuardReset;
  } else if (is({"COMPUTER", "GENERATE"})) {
    ev.verb = Verb::Generate;
  } else if (is({"COMPUTER", "RUN"})) {
    ev.verb = Verb::Run;
  } else if (t.size() == 3 && t[0] == "COMPUTER" && t[1] == "MODE") {
    if (t[2] != "1" && t[2] != "2") throw unknown();
    ev.verb = Verb::Mode;
    ev.argument = t[2] == "1" ? 1.0 : 2.0;
  } else if (t.size() == 4 && t[0] == "COMPUTER" && t[1] == "SET" && t[2] == "SPEED") {
    double v = 0.0;
    const char* b = t[3].data();
    const char* e = b + t[3].size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) throw unknown();
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "speed must be a positive number of mm/s");
    }
    ev.verb = Verb::SetSpeed;
    ev.argument = v;
  } else {
    throw unknown();
  }
  return ev;
}

std::string command_text(const CommandEvent& ev) {
  switch (ev.verb) {
    case Verb::MotorsOn: return "ROBOT MOTORS ON";
    case Verb::MotorsOff: return "ROBOT MOTORS OFF";
    case Verb::MoveLine: return "COMPUTER MOVE LINE";
    case Verb::SetSpeed: return "COMPUTER SET SPEED " + format_double(ev.argument);
    case Verb::Mode: return ev.argument == 2.0 ? "COMPUTER MODE 2" : "COMPUTER MODE 1";
    case Verb::GuardReset: return "COMPUTER GUARD RESET";
    case Verb::Generate: return "COMPUTER GENERATE";
    case Verb::Run: return "COMPUTER RUN";
  }
  return {};
}

const char* effect_kind_name(EffectKind k) {
  switch (k) {
    case EffectKind::VibrateOn: return "VibrateOn";
    case EffectKind::VibrateOff: return "VibrateOff";
    case EffectKind::Stop: return "Stop";
    case EffectKind::Move: return "Move";
    case EffectKind::Rejected: return "Rejected";
    case EffectKind::Notice: return "Notice";
    case EffectKind::Waypoint: return "Waypoint";
    case EffectKind::Program: return "Program";
  }
  return "Notice";
}

TeachSession::TeachSession(SessionConfig config, RobotProfile profile, Recognizers models)
    : config_(std::move(config)),
      profile_(std::move(profile)),
      models_(std::move(models)),
      thresholds_(config_.force_thresholds()),
      sim_(profile_.workspace, profile_.home, config_.contact),
      speed_(config_.speed.value_or(profile_.speed)) {
  config_.validate();
  const bool stat_recognizer =
      config_.recognizer == Method::ZeroCrossing || config_.recognizer == Method::FirstFour;
  if (models_.stat && stat_recognizer && models_.stat->method != config_.recognizer) {
    throw Error(ErrorCode::InvalidArgument,
                "statistical model was trained for Method " +
                    std::to_string(static_cast<int>(models_.stat->method)) +
                    " but the session uses Method " +
                    std::to_string(static_cast<int>(config_.recognizer)));
  }
  tare_ = sim_.sense(0);
  force_ = sim_.sense(0).minus(tare_);
}

std::vector<SessionEffect> TeachSession::take_effects() {
  std::vector<SessionEffect> out;
  out.swap(effects_);
  return out;
}

void TeachSession::notice(const std::string& reason, const std::string& text, std::int64_t t_ms) {
  SessionEffect e;
  e.kind = EffectKind::Notice;
  e.t_ms = t_ms;
  e.reason = reason;
  e.text = text;
  emit(std::move(e));
}

void TeachSession::record(const std::string& label, double confidence, const std::string& source,
                          std::int64_t t_ms, bool acted) {
  recognition_ = RecognitionRecord{label, confidence, source, t_ms, acted};
}

void TeachSession::button(bool pressed, std::int64_t t_ms) {
  if (pressed) {
    if (pressed_) return;  // second press without release
    pressed_ = true;
    moves_this_hold_ = 0;
    buffer_.clear();
    awaiting_crossing_ = false;
    // One gesture per hold: a press while the robot is moving starts nothing.
    capture_ = sim_.phase() == MotionPhase::Idle && !runner_;
    handled_ = !capture_;
    return;
  }
  if (!pressed_) return;
  pressed_ = false;
  if (capture_ && awaiting_crossing_ && !handled_) {
    record("Unrecognized", 0.0, "stat", t_ms, false);
    notice(error_code_name(ErrorCode::NoZeroCrossing), "B released before a zero crossing", t_ms);
  }
  if (capture_ && sim_.phase() == MotionPhase::Moving) {
    sim_.stop_move();
    SessionEffect e;
    e.kind = EffectKind::Stop;
    e.t_ms = t_ms;
    e.reason = "release";
    emit(std::move(e));
  }
  capture_ = false;
  handled_ = false;
  awaiting_crossing_ = false;
  buffer_.clear();
}

void TeachSession::abandon_hold() {
  pressed_ = false;
  capture_ = false;
  handled_ = false;
  awaiting_crossing_ = false;
  buffer_.clear();
}

void TeachSession::sample(const AccelSample& s) {
  if (!pressed_ || !capture_ || handled_) return;
  if (!buffer_.empty() && s.t_ms <= buffer_.back().t_ms) {
    throw Error(ErrorCode::ClockError, "sample t_ms " + std::to_string(s.t_ms) +
                                           " does not follow " +
                                           std::to_string(buffer_.back().t_ms));
  }
  AccelSample c = clamp_sample(s);
  c.b_pressed = true;
  buffer_.push_back(c);
  if (buffer_.size() < kShortWindowLength) return;
  window_started_ns_ = steady_ns();
  on_window(c.t_ms);
}

GestureWindow TeachSession::first_four() const {
  GestureWindow w;
  w.samples.assign(buffer_.begin(), buffer_.begin() + kShortWindowLength);
  return w;
}

void TeachSession::on_window(std::int64_t t_ms) {
  if (awaiting_crossing_) {
    const AccelTrace trace{buffer_, kDefaultRateHz};
    try {
      const auto w = segment_method1(trace, 0);
      awaiting_crossing_ = false;
      handled_ = true;
      if (!models_.stat) {
        record("Unrecognized", 0.0, "stat", t_ms, false);
        notice(error_code_name(ErrorCode::InvalidArgument), "no statistical model loaded", t_ms);
        return;
      }
      const auto r = classify_stat(*models_.stat, w);
      act_on_class(r.cls, r.score, "stat", t_ms);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoZeroCrossing) {
        handled_ = true;
        awaiting_crossing_ = false;
        notice(error_code_name(e.code()), e.what(), t_ms);
      }
    }
    return;
  }
  if (buffer_.size() != kShortWindowLength) return;

  const auto w4 = first_four();
  if (is_static_window(w4, config_.posture)) {
    const auto reading = detect_posture(w4, config_.posture);
    if (reading.posture == Posture::Horizontal) {
      handled_ = true;
      record(posture_name(reading.posture), 1.0, "posture", t_ms, false);
      return;
    }
    if (auto cls = posture_to_class(reading.posture)) {
      handled_ = true;
      act_on_class(*cls, 1.0, "posture", t_ms);
      return;
    }
    // Indeterminate tilt: let the recognizer have it.
  }
  if (config_.mode == 2) {
    decide_mode2(w4, t_ms);
  } else {
    decide_dynamic(w4, t_ms);
  }
}

void TeachSession::decide_dynamic(const GestureWindow& first4, std::int64_t t_ms) {
  switch (config_.recognizer) {
    case Method::Neural: {
      handled_ = true;
      if (!models_.ann) {
        record("Unrecognized", 0.0, "ann", t_ms, false);
        notice(error_code_name(ErrorCode::InvalidArgument), "no neural model loaded", t_ms);
        return;
      }
      const auto r = classify_ann(*models_.ann, first4, config_.accept_threshold);
      act_on_class(r.cls, r.confidence, "ann", t_ms);
      return;
    }
    case Method::FirstFour: {
      handled_ = true;
      if (!models_.stat) {
        record("Unrecognized", 0.0, "stat", t_ms, false);
        notice(error_code_name(ErrorCode::InvalidArgument), "no statistical model loaded", t_ms);
        return;
      }
      const auto r = classify_stat(*models_.stat, first4);
      act_on_class(r.cls, r.score, "stat", t_ms);
      return;
    }
    case Method::ZeroCrossing:
      awaiting_crossing_ = true;
      on_window(t_ms);
      return;
  }
}

void TeachSession::decide_mode2(const GestureWindow& first4, std::int64_t t_ms) {
  handled_ = true;
  // Rotations keep their classes in mode 2; only the network and the
  // first-four bands can name one from these four samples.
  if (models_.ann) {
    const auto r = classify_ann(*models_.ann, first4, config_.accept_threshold);
    if (is_rotation(r.cls)) {
      act_on_class(r.cls, r.confidence, "ann", t_ms);
      return;
    }
  } else if (models_.stat && models_.stat->method == Method::FirstFour) {
    const auto r = classify_stat(*models_.stat, first4);
    if (is_rotation(r.cls)) {
      act_on_class(r.cls, r.score, "stat", t_ms);
      return;
    }
  }
  const Vec3 a = mean_compensated(first4);
  const auto dir = normalize_direction(a, config_.deadband_g);
  if (!dir) {
    record("NoMotion", 0.0, "direction", t_ms, false);
    return;
  }
  try {
    const auto inc = translation_increment(sim_.workspace(), sim_.pose().position(), dir);
    const bool moved = issue_move(inc, t_ms);
    record("Direction", std::min(1.0, norm(a)), "direction", t_ms, moved);
  } catch (const Error& e) {
    record("Direction", 0.0, "direction", t_ms, false);
    notice(error_code_name(e.code()), e.what(), t_ms);
  }
}

void TeachSession::act_on_class(GestureClass cls, double confidence, const std::string& source,
                                std::int64_t t_ms) {
  if (cls == GestureClass::Unrecognized) {
    record("Unrecognized", confidence, source, t_ms, false);
    return;
  }
  const std::string label(class_label(cls));
  // Z rotations are only trusted from the network.
  if ((cls == GestureClass::RZPos || cls == GestureClass::RZNeg) && source != "ann") {
    static_assert(rz_requires_ann());
    bool confirmed = false;
    if (models_.ann && buffer_.size() >= kShortWindowLength) {
      const auto r = classify_ann(*models_.ann, first_four(), config_.accept_threshold);
      confirmed = r.cls == cls;
    }
    if (!confirmed) {
      record(label, confidence, source, t_ms, false);
      notice("Unconfirmed", label + " needs confirmation from the neural recognizer", t_ms);
      return;
    }
  }
  try {
    PoseIncrement inc;
    if (is_translation(cls)) {
      inc = translation_increment(sim_.workspace(), sim_.pose().position(),
                                  class_to_direction(cls));
    } else {
      inc = rotation_increment(sim_.workspace(), sim_.pose(), cls);
    }
    const bool moved = issue_move(inc, t_ms);
    record(label, confidence, source, t_ms, moved);
  } catch (const Error& e) {
    record(label, confidence, source, t_ms, false);
    notice(error_code_name(e.code()), e.what(), t_ms);
  }
}

bool TeachSession::issue_move(const PoseIncrement& inc, std::int64_t t_ms) {
  if (guard_.phase == GuardPhase::Stopped) {
    notice(error_code_name(ErrorCode::GuardStopped), "force guard is stopped; reset it first",
           t_ms);
    return false;
  }
  if (!sim_.motors_on()) {
    notice(error_code_name(ErrorCode::MotorsOff), "robot motors are off", t_ms);
    return false;
  }
  if (inc.is_zero()) {
    notice("AtLimit", "already at the limit in that direction", t_ms);
    return false;
  }
  if (moves_this_hold_ > 0) return false;
  sim_.start_move(inc, speed_);
  latency_ms_ = static_cast<double>(steady_ns() - window_started_ns_) / 1e6;
  ++moves_this_hold_;
  SessionEffect e;
  e.kind = EffectKind::Move;
  e.t_ms = t_ms;
  e.increment = inc;
  emit(std::move(e));
  return true;
}

CommandOutcome TeachSession::command(const std::string& text, double confidence,
                                     std::int64_t t_ms) {
  CommandEvent ev = parse_command(text);
  ev.confidence = confidence;
  ev.t_ms = t_ms;
  return command(ev);
}

CommandOutcome TeachSession::command(const CommandEvent& ev) {
  if (!(ev.confidence >= 0.0 && ev.confidence <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "confidence must lie in [0, 1]");
  }
  const std::int64_t t = ev.t_ms;
  if (ev.confidence < config_.command_confidence_min) {
    SessionEffect e;
    e.kind = EffectKind::Rejected;
    e.t_ms = t;
    e.reason = "confidence";
    e.text = command_text(ev);
    e.value = ev.confidence;
    emit(std::move(e));
    return CommandOutcome::Rejected;
  }
  auto fail = [&](ErrorCode code, const std::string& msg) {
    notice(error_code_name(code), msg, t);
    return CommandOutcome::Failed;
  };
  switch (ev.verb) {
    case Verb::MotorsOn:
      sim_.set_motors(true);
      break;
    case Verb::MotorsOff: {
      const bool was_moving = sim_.phase() == MotionPhase::Moving;
      sim_.set_motors(false);
      if (runner_) {
        runner_.reset();
        notice("RunAborted", "program run aborted: motors off", t);
      }
      if (was_moving) {
        SessionEffect e;
        e.kind = EffectKind::Stop;
        e.t_ms = t;
        e.reason = "motors_off";
        emit(std::move(e));
      }
      break;
    }
    case Verb::MoveLine: {
      Waypoint w{sim_.pose(), MotionKind::Line, speed_.linear_mm_s, waypoints_.size()};
      waypoints_.push_back(w);
      SessionEffect e;
      e.kind = EffectKind::Waypoint;
      e.t_ms = t;
      e.value = static_cast<double>(w.index);
      emit(std::move(e));
      break;
    }
    case Verb::SetSpeed:
      speed_.linear_mm_s = ev.argument;
      break;
    case Verb::Mode:
      config_.mode = ev.argument == 2.0 ? 2 : 1;
      break;
    case Verb::GuardReset:
      if (guard_.phase != GuardPhase::Stopped) {
        return fail(ErrorCode::NotStopped, "guard reset is only valid after a stop");
      }
      guard_ = reset_guard(guard_);
      break;
    case Verb::Generate: {
      if (waypoints_.empty()) return fail(ErrorCode::EmptyProgram, "no waypoints captured");
      program_ = generate_program(waypoints_, config_.program_name, profile_.name);
      SessionEffect e;
      e.kind = EffectKind::Program;
      e.t_ms = t;
      e.text = program_text(*program_);
      emit(std::move(e));
      break;
    }
    case Verb::Run: {
      if (!program_) return fail(ErrorCode::EmptyProgram, "no program generated");
      if (!sim_.motors_on()) return fail(ErrorCode::MotorsOff, "robot motors are off");
      if (guard_.phase == GuardPhase::Stopped) {
        return fail(ErrorCode::GuardStopped, "force guard is stopped; reset it first");
      }
      if (sim_.phase() == MotionPhase::Moving) {
        return fail(ErrorCode::InvalidArgument, "robot is moving");
      }
      runner_.emplace(*program_, speed_.angular_deg_s);
      runner_->advance(sim_);
      notice("RunStarted", "program " + program_->name + " started", t);
      break;
    }
  }
  return CommandOutcome::Accepted;
}

void TeachSession::tick(std::int64_t now_ms) {
  force_ = sim_.tick(config_.tick_ms, now_ms).minus(tare_);
  const auto upd = update_guard(guard_, force_, thresholds_);
  guard_ = upd.state;
  for (const auto g : upd.effects) {
    SessionEffect e;
    e.t_ms = now_ms;
    switch (g) {
      case GuardEffect::VibrateOn:
        e.kind = EffectKind::VibrateOn;
        break;
      case GuardEffect::VibrateOff:
        e.kind = EffectKind::VibrateOff;
        break;
      case GuardEffect::StopRobot:
        sim_.stop_move();
        e.kind = EffectKind::Stop;
        e.reason = "guard";
        if (guard_.offending) e.text = ft_axis_name(*guard_.offending);
        break;
    }
    emit(std::move(e));
  }
  if (!runner_) return;
  if (guard_.phase == GuardPhase::Stopped) {
    runner_.reset();
    notice(error_code_name(ErrorCode::GuardStopped), "program run aborted by the force guard",
           now_ms);
    return;
  }
  try {
    switch (runner_->advance(sim_)) {
      case ProgramRunner::Status::Running:
        break;
      case ProgramRunner::Status::Done:
        runner_.reset();
        notice("RunComplete", "program finished", now_ms);
        break;
      case ProgramRunner::Status::Aborted:
        notice("RunAborted",
               "statement " + std::to_string(runner_->next_statement()) + " did not reach its target",
               now_ms);
        runner_.reset();
        break;
    }
  } catch (const Error& e) {
    runner_.reset();
    notice(error_code_name(e.code()), e.what(), now_ms);
  }
}

bool TeachSession::watchdog(std::int64_t now_ms, std::int64_t last_heartbeat_ms,
                            std::int64_t timeout_ms) {
  if (!sim_.watchdog(now_ms, last_heartbeat_ms, timeout_ms)) return false;
  SessionEffect e;
  e.kind = EffectKind::Stop;
  e.t_ms = now_ms;
  e.reason = "watchdog";
  emit(std::move(e));
  return true;
}

}  // namespace gesteach
