#include "program.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace gesteach {

RobotProgram generate_program(const std::vector<Waypoint>& waypoints, const std::string& name,
                              const std::string& profile) {
  if (waypoints.empty()) throw Error(ErrorCode::EmptyProgram, "no waypoints captured");
  RobotProgram p{name, profile, {}};
  for (const auto& w : waypoints) p.statements.push_back({w.pose, w.speed_mm_s});
  return p;
}

namespace {

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

bool single_token(const std::string& s) {
  return !s.empty() && std::none_of(s.begin(), s.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  });
}

}  // namespace

std::string program_text(const RobotProgram& program) {
  if (!single_token(program.name) || !single_token(program.profile)) {
    throw Error(ErrorCode::InvalidArgument, "program and profile names must be single tokens");
  }
  std::string out = "PROGRAM " + program.name + " PROFILE " + program.profile + "\n";
  for (const auto& s : program.statements) {
    const Pose& p = s.target;
    out += "MOVL X=" + fixed3(p.x) + " Y=" + fixed3(p.y) + " Z=" + fixed3(p.z) +
           " RX=" + fixed3(p.rx) + " RY=" + fixed3(p.ry) + " RZ=" + fixed3(p.rz) +
           " V=" + fixed3(s.speed_mm_s) + "\n";
  }
  out += "END\n";
  return out;
}

RobotProgram parse_program_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& m) {
    throw Error(ErrorCode::ParseError, "program line " + std::to_string(line_no) + ": " + m);
  };
  RobotProgram p;
  bool header = false;
  bool footer = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (footer) fail("content after END");
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (!header) {
      std::string kw;
      if (word != "PROGRAM" || !(ls >> p.name >> kw >> p.profile) || kw != "PROFILE") {
        fail("expected 'PROGRAM <name> PROFILE <profile>'");
      }
      if (ls >> kw) fail("trailing text in header");
      header = true;
      continue;
    }
    if (word == "END") {
      footer = true;
      continue;
    }
    if (word != "MOVL") fail("unknown statement '" + word + "'");
    static constexpr const char* kKeys[] = {"X", "Y", "Z", "RX", "RY", "RZ", "V"};
    double values[7];
    for (int k = 0; k < 7; ++k) {
      std::string field;
      if (!(ls >> field)) fail("missing field " + std::string(kKeys[k]));
      const std::string prefix = std::string(kKeys[k]) + "=";
      if (field.rfind(prefix, 0) != 0) fail("expected " + prefix);
      const char* b = field.data() + prefix.size();
      const char* e = field.data() + field.size();
      auto [ptr, ec] = std::from_chars(b, e, values[k]);
      if (ec != std::errc() || ptr != e || !std::isfinite(values[k])) {
        fail("bad number in " + field);
      }
    }
    std::string extra;
    if (ls >> extra) fail("trailing text after V=");
    if (!(values[6] > 0.0)) fail("V must be positive");
    p.statements.push_back(
        {Pose{values[0], values[1], values[2], values[3], values[4], values[5]}, values[6]});
  }
  if (!header) fail("missing PROGRAM header");
  if (!footer) fail("missing END");
  if (p.statements.empty()) throw Error(ErrorCode::EmptyProgram, "program has no statements");
  return p;
}

std::string program_to_json(const RobotProgram& program) {
  nlohmann::ordered_json j;
  j["format"] = "gesteach-program";
  j["name"] = program.name;
  j["profile"] = program.profile;
  j["statements"] = nlohmann::ordered_json::array();
  for (const auto& s : program.statements) {
    const Pose& p = s.target;
    j["statements"].push_back({{"op", "MOVL"},
                               {"x", p.x},
                               {"y", p.y},
                               {"z", p.z},
                               {"rx", p.rx},
                               {"ry", p.ry},
                               {"rz", p.rz},
                               {"v", s.speed_mm_s}});
  }
  return j.dump(2) + "\n";
}

RobotProgram program_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format") != "gesteach-program") {
      throw Error(ErrorCode::ParseError, "not a gesteach-program document");
    }
    RobotProgram p;
    p.name = j.at("name").get<std::string>();
    p.profile = j.at("profile").get<std::string>();
    for (const auto& s : j.at("statements")) {
      if (s.at("op") != "MOVL") throw Error(ErrorCode::ParseError, "unknown op");
      p.statements.push_back({Pose{s.at("x"), s.at("y"), s.at("z"), s.at("rx"), s.at("ry"),
                                   s.at("rz")},
                              s.at("v").get<double>()});
    }
    if (p.statements.empty()) throw Error(ErrorCode::EmptyProgram, "program has no statements");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("program: ") + e.what());
  }
}

namespace {

bool at_target(const Pose& a, const Pose& b, double tol) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol && std::abs(a.z - b.z) <= tol &&
         std::abs(a.rx - b.rx) <= tol && std::abs(a.ry - b.ry) <= tol &&
         std::abs(a.rz - b.rz) <= tol;
}

}  // namespace

ProgramRunner::Status ProgramRunner::advance(RobotSim& sim, double tolerance_mm) {
  for (;;) {
    if (segment_open_) {
      if (sim.phase() == MotionPhase::Moving) return Status::Running;
      // Idle short of the target: something stopped the move.
      if (!at_target(sim.pose(), program_.statements[next_ - 1].target, tolerance_mm)) {
        return Status::Aborted;
      }
      segment_open_ = false;
    }
    if (next_ >= program_.statements.size()) return Status::Done;
    const MovL& s = program_.statements[next_];
    sim.start_move(difference(s.target, sim.pose()), MotionSpeed{s.speed_mm_s, angular_deg_s_});
    ++next_;
    segment_open_ = true;
  }
}

ReplayResult replay_program(RobotSim& sim, const RobotProgram& program,
                            const ForceThresholds& thresholds, std::int64_t tick_ms) {
  if (!sim.motors_on()) throw Error(ErrorCode::MotorsOff, "robot motors are off");
  if (tick_ms <= 0) throw Error(ErrorCode::InvalidArgument, "tick must be positive");
  ProgramRunner runner(program);
  const ForceReading tare = sim.sense(0);
  GuardState guard;
  std::int64_t now = 0;
  auto status = runner.advance(sim);
  while (status == ProgramRunner::Status::Running) {
    now += tick_ms;
    const auto reading = sim.tick(tick_ms, now).minus(tare);
    const auto upd = update_guard(guard, reading, thresholds);
    guard = upd.state;
    if (guard.phase == GuardPhase::Stopped) {
      sim.stop_move();
      throw Error(ErrorCode::GuardStopped,
                  "force guard stopped replay at statement " +
                      std::to_string(runner.next_statement()) + " (t=" + std::to_string(now) +
                      " ms)");
    }
    status = runner.advance(sim);
  }
  if (status == ProgramRunner::Status::Aborted) {
    throw Error(ErrorCode::Degenerate, "statement " + std::to_string(runner.next_statement()) +
                                           " halted on the field-of-operation boundary");
  }
  return {sim.pose(), program.statements.size(), now};
}

}  // namespace gesteach
