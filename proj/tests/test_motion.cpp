#include <doctest.h>

#include <random>

#include "error.hpp"
#include "force_guard.hpp"
#include "program.hpp"
#include "robot_sim.hpp"

using namespace gesteach;

namespace {

ForceReading fz(double v) {
  ForceReading r;
  r.fz = v;
  return r;
}

Workspace wide() {
  Workspace ws;
  ws.r_ext = 5000;
  ws.r_int = 0;
  ws.k_max = 5000;
  return ws;
}

}  // namespace

TEST_SUITE("force_guard") {

TEST_CASE("stop level") {
  const ForceThresholds th(10, 0.2);
  CHECK(th.force_stop() == 12.0);
  CHECK(th.torque_alert() == 10.0);
  CHECK_THROWS_AS(ForceThresholds(0, 0.2), Error);
  CHECK_THROWS_AS(ForceThresholds(10, 1.5), Error);
}

TEST_CASE("stop level identity for random thresholds") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> f(0.1, 500.0), p(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double fa = f(rng), pp = p(rng);
    CHECK(ForceThresholds(fa, pp).force_stop() == fa * (1.0 + pp));
  }
}

TEST_CASE("alert and recovery") {
  const ForceThresholds th(10, 0.2);
  GuardState s;
  const std::vector<double> ramp{0, 9, 11, 11.5, 9};
  const std::vector<GuardPhase> phases{GuardPhase::Normal, GuardPhase::Normal, GuardPhase::Alert,
                                       GuardPhase::Alert, GuardPhase::Normal};
  std::vector<std::vector<GuardEffect>> effects;
  for (std::size_t i = 0; i < ramp.size(); ++i) {
    const auto u = update_guard(s, fz(ramp[i]), th);
    CHECK(u.state.phase == phases[i]);
    effects.push_back(u.effects);
    s = u.state;
  }
  CHECK(effects[2] == std::vector<GuardEffect>{GuardEffect::VibrateOn});
  CHECK(effects[3].empty());
  CHECK(effects[4] == std::vector<GuardEffect>{GuardEffect::VibrateOff});
}

TEST_CASE("alert then stop") {
  const ForceThresholds th(10, 0.2);
  GuardState s;
  s = update_guard(s, fz(0), th).state;
  auto u = update_guard(s, fz(11), th);
  CHECK(u.state.phase == GuardPhase::Alert);
  u = update_guard(u.state, fz(12), th);
  CHECK(u.state.phase == GuardPhase::Stopped);
  CHECK(u.state.offending == FtAxis::Fz);
  CHECK(std::find(u.effects.begin(), u.effects.end(), GuardEffect::StopRobot) != u.effects.end());
  // absorbing
  CHECK(update_guard(u.state, fz(0), th).state.phase == GuardPhase::Stopped);
}

TEST_CASE("torque and negative components trip too") {
  const ForceThresholds th(20, 0.25, 2.0);
  ForceReading r;
  r.tx = -2.6;
  CHECK(update_guard({}, r, th).state.phase == GuardPhase::Stopped);
  r = {};
  r.fy = -21;
  CHECK(update_guard({}, r, th).state.phase == GuardPhase::Alert);
}

TEST_CASE("reset") {
  const ForceThresholds th(10, 0.2);
  auto s = update_guard({}, fz(50), th).state;
  REQUIRE(s.phase == GuardPhase::Stopped);
  s = reset_guard(s);
  CHECK(s.phase == GuardPhase::Normal);
  try {
    reset_guard(s);
    FAIL("expected NotStopped");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotStopped);
  }
  CHECK(update_guard(s, fz(50), th).state.phase == GuardPhase::Stopped);
}

}  // TEST_SUITE

TEST_SUITE("robot_sim") {

TEST_CASE("linear move at 75 mm/s") {
  RobotSim sim(wide(), {0, 0, 1000, 0, 0, 0});
  PoseIncrement inc;
  inc.i[0] = 100;
  sim.start_move(inc, {75, 20});
  CHECK(sim.phase() == MotionPhase::Moving);
  for (int i = 0; i < 100; ++i) sim.tick(10);
  CHECK(sim.pose().x == doctest::Approx(75).epsilon(1e-12));
  CHECK(sim.pose().z == 1000);
  CHECK(sim.phase() == MotionPhase::Moving);
}

TEST_CASE("stop freezes the pose") {
  RobotSim sim(wide(), {0, 0, 1000, 0, 0, 0});
  PoseIncrement inc;
  inc.i[0] = 100;
  sim.start_move(inc, {75, 20});
  for (int i = 0; i < 50; ++i) sim.tick(10);
  sim.stop_move();
  CHECK(sim.phase() == MotionPhase::Idle);
  CHECK(sim.pose().x == doctest::Approx(37.5).epsilon(1e-12));
  sim.stop_move();
  CHECK(sim.pose().x == doctest::Approx(37.5).epsilon(1e-12));
}

TEST_CASE("reaching the target") {
  RobotSim sim(wide(), {0, 0, 1000, 0, 0, 0});
  PoseIncrement inc;
  inc.i[0] = 7.5;  // exactly one 100 ms tick at 75 mm/s
  sim.start_move(inc, {75, 20});
  sim.tick(100);
  CHECK(sim.phase() == MotionPhase::Idle);
  CHECK(sim.pose().x == 7.5);
  sim.stop_move();
  CHECK(sim.pose().x == 7.5);
}

TEST_CASE("zero increment and motors off") {
  RobotSim sim(wide(), {0, 0, 1000, 0, 0, 0});
  sim.start_move({}, {75, 20});
  CHECK(sim.phase() == MotionPhase::Idle);
  sim.set_motors(false);
  PoseIncrement inc;
  inc.i[1] = 10;
  try {
    sim.start_move(inc, {75, 20});
    FAIL("expected MotorsOff");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MotorsOff);
  }
}

TEST_CASE("contact spring") {
  RobotSim sim(wide(), {0, 0, 100, 0, 0, 0}, {50.0, 5.0, 0.0});
  CHECK(sim.sense().fz == 0.0);
  RobotSim low(wide(), {0, 0, 48, 0, 0, 0}, {50.0, 5.0, 0.0});
  CHECK(low.sense().fz == doctest::Approx(10.0));
}

TEST_CASE("watchdog") {
  RobotSim sim(wide(), {0, 0, 1000, 0, 0, 0});
  PoseIncrement inc;
  inc.i[0] = 1000;
  sim.start_move(inc, {75, 20});
  CHECK_FALSE(sim.watchdog(150, 0, 200));
  CHECK(sim.phase() == MotionPhase::Moving);
  CHECK(sim.watchdog(250, 0, 200));
  CHECK(sim.phase() == MotionPhase::Idle);
  CHECK_FALSE(sim.watchdog(500, 0, 200));
}

TEST_CASE("a move halts on the field boundary") {
  Workspace ws;
  ws.r_ext = 1010;
  ws.r_int = 0;
  RobotSim sim(ws, {1000, 0, 0, 0, 0, 0});
  PoseIncrement inc;
  inc.i[0] = 500;
  sim.start_move(inc, {75, 20});
  for (int i = 0; i < 100; ++i) sim.tick(10);
  CHECK(sim.phase() == MotionPhase::Idle);
  CHECK(sim.pose().x <= 1010.0 + 1e-6);  // shell test tolerance
}

}  // TEST_SUITE

TEST_SUITE("program") {

std::vector<Waypoint> two_waypoints() {
  std::vector<Waypoint> w(2);
  w[0].pose = {0, 0, 1000, 0, 0, 0};
  w[1].pose = {75, 0, 1000, 0, 0, 0};
  w[1].index = 1;
  return w;
}

TEST_CASE("one MOVL per waypoint") {
  const auto p = generate_program(two_waypoints(), "TEACH", "HP6-like");
  REQUIRE(p.statements.size() == 2);
  CHECK(p.statements[0].target.x == 0);
  CHECK(p.statements[1].target.x == 75);
  const auto text = program_text(p);
  CHECK(text ==
        "PROGRAM TEACH PROFILE HP6-like\n"
        "MOVL X=0.000 Y=0.000 Z=1000.000 RX=0.000 RY=0.000 RZ=0.000 V=75.000\n"
        "MOVL X=75.000 Y=0.000 Z=1000.000 RX=0.000 RY=0.000 RZ=0.000 V=75.000\n"
        "END\n");
  CHECK(program_text(generate_program(two_waypoints(), "TEACH", "HP6-like")) == text);
  CHECK_THROWS_AS(generate_program({}, "TEACH", "HP6-like"), Error);
}

TEST_CASE("text and json round trips") {
  const auto p = generate_program(two_waypoints(), "TEACH", "HP6-like");
  CHECK(parse_program_text(program_text(p)) == p);
  CHECK(program_from_json(program_to_json(p)) == p);
  try {
    parse_program_text("PROGRAM A PROFILE B\nMOVL X=1\nEND\n");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("replay ends at the last target") {
  const auto p = generate_program(two_waypoints(), "TEACH", "HP6-like");
  RobotSim sim(wide(), {0, 0, 1000, 0, 0, 0});
  const auto r = replay_program(sim, p, ForceThresholds(20, 0.25, 2.0));
  CHECK(r.statements_completed == 2);
  CHECK(r.final_pose.x == doctest::Approx(75).epsilon(1e-12));
  CHECK(r.final_pose.z == 1000);
}

TEST_CASE("diving through the contact plane is guard-stopped") {
  std::vector<Waypoint> w(2);
  w[0].pose = {0, 0, 100, 0, 0, 0};
  w[1].pose = {0, 0, 40, 0, 0, 0};
  const auto p = generate_program(w, "DIVE", "test");
  // plane at z=50, 5 N/mm: 20 N alert at z=46, 25 N stop at z=45
  RobotSim sim(wide(), {0, 0, 100, 0, 0, 0}, {50.0, 5.0, 0.0});
  try {
    replay_program(sim, p, ForceThresholds(20, 0.25, 2.0));
    FAIL("expected GuardStopped");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GuardStopped);
  }
  CHECK(sim.pose().z > 40.0);
  CHECK(sim.pose().z <= 45.0 + 1e-9);
}

TEST_CASE("replay needs motors") {
  const auto p = generate_program(two_waypoints(), "TEACH", "HP6-like");
  RobotSim sim(wide(), {0, 0, 1000, 0, 0, 0});
  sim.set_motors(false);
  CHECK_THROWS_AS(replay_program(sim, p, ForceThresholds(20, 0.25)), Error);
}

}  // TEST_SUITE
