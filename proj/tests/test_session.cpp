#include <doctest.h>

#include <random>

#include "config.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "session.hpp"
#include "support.hpp"

using namespace gesteach;

namespace {

struct Rig {
  TeachSession s;
  std::int64_t t = 0;

  explicit Rig(SessionConfig cfg = {}, Recognizers models = default_models(),
               RobotProfile profile = hp6_profile())
      : s(std::move(cfg), std::move(profile), std::move(models)) {}

  static Recognizers default_models() {
    Recognizers r;
    r.ann = gesteach::testing::shared_ann();
    return r;
  }

  void step(int n = 1) {
    for (int i = 0; i < n; ++i) {
      t += 10;
      s.tick(t);
    }
  }
  void press() { s.button(true, t); }
  void release() { s.button(false, t); }
  void feed(const AccelSample& a) {
    AccelSample c = a;
    c.t_ms = t;
    s.sample(c);
    step();
  }
  void feed_class(GestureClass cls, std::size_t n = 4, std::uint64_t seed = 3, double noise = 0.0) {
    const GeneratorProfile p;
    const auto trace = generate_synthetic(cls, noise, seed, p);
    for (std::size_t i = 0; i < n; ++i) feed(trace.samples[p.lead_in + i]);
  }
  void feed_const(Vec3 a, std::size_t n = 4) {
    for (std::size_t i = 0; i < n; ++i) feed({0, a.x, a.y, a.z, true});
  }
  std::vector<SessionEffect> effects() { return s.take_effects(); }
  std::size_t count(const std::vector<SessionEffect>& v, EffectKind k) {
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](const auto& e) { return e.kind == k; }));
  }
};

const SessionEffect* find(const std::vector<SessionEffect>& v, EffectKind k) {
  for (const auto& e : v) {
    if (e.kind == k) return &e;
  }
  return nullptr;
}

SessionConfig mode2() {
  SessionConfig c;
  c.mode = 2;
  return c;
}

}  // namespace

TEST_SUITE("commands") {

TEST_CASE("closed grammar") {
  CHECK(parse_command("COMPUTER MOVE LINE").verb == Verb::MoveLine);
  CHECK(parse_command("  ROBOT   MOTORS OFF ").verb == Verb::MotorsOff);
  CHECK(parse_command("COMPUTER SET SPEED 120.5").argument == 120.5);
  CHECK(parse_command("COMPUTER MODE 2").argument == 2.0);
  auto code = [](const char* text) {
    try {
      parse_command(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Ok;
  };
  CHECK(code("COMPUTER DANCE") == ErrorCode::UnknownVerb);
  CHECK(code("computer move line") == ErrorCode::UnknownVerb);
  CHECK(code("COMPUTER MODE 3") == ErrorCode::UnknownVerb);
  CHECK(code("COMPUTER SET SPEED fast") == ErrorCode::UnknownVerb);
  CHECK(code("COMPUTER SET SPEED -5") == ErrorCode::InvalidArgument);
  for (const char* t : {"ROBOT MOTORS ON", "ROBOT MOTORS OFF", "COMPUTER MOVE LINE", "COMPUTER GENERATE",
                        "COMPUTER RUN", "COMPUTER GUARD RESET", "COMPUTER MODE 1"}) {
    CHECK(command_text(parse_command(t)) == t);
  }
}

TEST_CASE("MOVE LINE appends the current pose") {
  Rig r;
  const Pose p = r.s.sim().pose();
  CHECK(r.s.command("COMPUTER MOVE LINE", 0.9, 0) == CommandOutcome::Accepted);
  REQUIRE(r.s.waypoints().size() == 1);
  CHECK(r.s.waypoints()[0].pose == p);
  const auto e = r.effects();
  REQUIRE(find(e, EffectKind::Waypoint));
}

TEST_CASE("low confidence is rejected without side effects") {
  Rig r;
  CHECK(r.s.command("ROBOT MOTORS OFF", 0.65, 0) == CommandOutcome::Rejected);
  CHECK(r.s.sim().motors_on());
  const auto e = r.effects();
  REQUIRE(e.size() == 1);
  CHECK(e[0].kind == EffectKind::Rejected);
  CHECK(e[0].value == 0.65);
  CHECK(r.s.command("ROBOT MOTORS OFF", 0.70, 0) == CommandOutcome::Accepted);
  CHECK_FALSE(r.s.sim().motors_on());
  CHECK_THROWS_AS(r.s.command("COMPUTER DANCE", 0.99, 0), Error);
  CHECK_THROWS_AS(r.s.command("COMPUTER RUN", 1.5, 0), Error);
}

TEST_CASE("random command streams never act below the threshold") {
  const std::vector<std::string> verbs{"ROBOT MOTORS ON", "ROBOT MOTORS OFF", "COMPUTER MOVE LINE",
                                       "COMPUTER SET SPEED 50", "COMPUTER MODE 2", "COMPUTER GENERATE",
                                       "COMPUTER GUARD RESET", "COMPUTER RUN"};
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> pick(0, verbs.size() - 1);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  Rig r;
  for (int i = 0; i < 500; ++i) {
    const double c = conf(rng);
    const auto before_wp = r.s.waypoints().size();
    const bool motors = r.s.sim().motors_on();
    const double speed = r.s.speed().linear_mm_s;
    const int mode = r.s.mode();
    const auto outcome = r.s.command(verbs[pick(rng)], c, r.t);
    if (c < 0.7) {
      CHECK(outcome == CommandOutcome::Rejected);
      CHECK(r.s.waypoints().size() == before_wp);
      CHECK(r.s.sim().motors_on() == motors);
      CHECK(r.s.speed().linear_mm_s == speed);
      CHECK(r.s.mode() == mode);
    } else {
      CHECK(outcome != CommandOutcome::Rejected);
    }
    r.step();
    r.effects();
  }
}

TEST_CASE("GENERATE and RUN preconditions") {
  Rig r;
  CHECK(r.s.command("COMPUTER GENERATE", 1, 0) == CommandOutcome::Failed);
  CHECK(find(r.effects(), EffectKind::Notice)->reason == "EmptyProgram");
  CHECK(r.s.command("COMPUTER RUN", 1, 0) == CommandOutcome::Failed);
  r.effects();
  r.s.command("COMPUTER MOVE LINE", 1, 0);
  CHECK(r.s.command("COMPUTER GENERATE", 1, 0) == CommandOutcome::Accepted);
  const auto e = r.effects();
  REQUIRE(find(e, EffectKind::Program));
  CHECK(find(e, EffectKind::Program)->text.rfind("PROGRAM TEACH PROFILE HP6-like\n", 0) == 0);
  r.s.command("ROBOT MOTORS OFF", 1, 0);
  CHECK(r.s.command("COMPUTER RUN", 1, 0) == CommandOutcome::Failed);
  CHECK(find(r.effects(), EffectKind::Notice)->reason == "MotorsOff");
  CHECK(r.s.command("COMPUTER GUARD RESET", 1, 0) == CommandOutcome::Failed);
  CHECK(find(r.effects(), EffectKind::Notice)->reason == "NotStopped");
}

}  // TEST_SUITE

TEST_SUITE("session") {

TEST_CASE("press starts capture, second press is ignored") {
  Rig r;
  r.press();
  CHECK(r.s.capturing());
  r.press();
  CHECK(r.s.capturing());
  r.release();
  CHECK_FALSE(r.s.capturing());
  r.release();  // idle release is a no-op
  CHECK(r.effects().empty());
}

TEST_CASE("mode 1 X+ from (1000,0,0) goes 1012 mm along x") {
  auto profile = hp6_profile();
  profile.home = {1000, 0, 0, 0, 0, 0};
  Rig r({}, Rig::default_models(), profile);
  r.press();
  r.feed_class(GestureClass::XPos);
  const auto e = r.effects();
  const auto* move = find(e, EffectKind::Move);
  REQUIRE(move);
  CHECK(move->increment.i[0] == doctest::Approx(1012));
  for (int j = 1; j < 6; ++j) CHECK(move->increment.i[j] == 0.0);
  CHECK(r.s.sim().phase() == MotionPhase::Moving);
  REQUIRE(r.s.last_latency_ms());
  CHECK(*r.s.last_latency_ms() < 20.0);
  r.release();
  CHECK(r.s.sim().phase() == MotionPhase::Idle);
  CHECK(find(r.effects(), EffectKind::Stop)->reason == "release");
}

TEST_CASE("release before four samples aborts without motion") {
  Rig r;
  r.press();
  r.feed_class(GestureClass::XPos, 3);
  r.release();
  CHECK(r.s.sim().phase() == MotionPhase::Idle);
  CHECK(r.count(r.effects(), EffectKind::Move) == 0);
}

TEST_CASE("mode 2 rest window does nothing") {
  Rig r(mode2());
  r.press();
  r.feed_const({0, 0, 1});
  CHECK(r.s.sim().phase() == MotionPhase::Idle);
  CHECK(r.count(r.effects(), EffectKind::Move) == 0);
  REQUIRE(r.s.last_recognition());
  CHECK_FALSE(r.s.last_recognition()->acted);
}

TEST_CASE("mode 2 follows the measured direction") {
  Rig r(mode2());
  r.press();
  r.feed_const({0.3, 0.4, 1});
  const auto* move = find(r.effects(), EffectKind::Move);
  REQUIRE(move);
  CHECK(move->increment.i[0] / move->increment.i[1] == doctest::Approx(0.75));
  CHECK(move->increment.i[2] == doctest::Approx(0.0));
}

TEST_CASE("unrecognized windows leave the robot stopped") {
  // the bands reject what they never saw; a sigmoid network always names something
  SessionConfig cfg;
  cfg.recognizer = Method::FirstFour;
  Recognizers m;
  m.stat = *train_recognizer(generate_corpus(0.05, 30, 2), Method::FirstFour, {}).model.stat;
  Rig r(cfg, m);
  r.press();
  // violent, non-static, unlike any trained class
  r.feed({0, 2.9, -2.9, -2.0, true});
  r.feed({0, -2.9, 2.9, 2.9, true});
  r.feed({0, 2.9, 2.9, -2.9, true});
  r.feed({0, -2.9, -2.9, 2.9, true});
  CHECK(r.s.sim().phase() == MotionPhase::Idle);
  CHECK(r.count(r.effects(), EffectKind::Move) == 0);
}

TEST_CASE("static tilt rotates about the posture axis") {
  Rig r;
  r.press();
  r.feed_const({1, 0, 0});  // RY-
  const auto* move = find(r.effects(), EffectKind::Move);
  REQUIRE(move);
  CHECK(move->increment.i[4] < 0.0);
  CHECK(r.s.last_recognition()->source == "posture");
}

TEST_CASE("RZ goes through the network") {
  Rig r;
  r.press();
  r.feed_class(GestureClass::RZPos);
  REQUIRE(r.s.last_recognition());
  CHECK(r.s.last_recognition()->source == "ann");
  CHECK(r.s.last_recognition()->label == "RZ+");
  const auto* move = find(r.effects(), EffectKind::Move);
  REQUIRE(move);
  CHECK(move->increment.i[5] > 0.0);
}

TEST_CASE("one gesture per hold") {
  Rig r;
  r.press();
  r.feed_class(GestureClass::XPos, 12);
  r.feed_class(GestureClass::YPos, 8);
  CHECK(r.count(r.effects(), EffectKind::Move) == 1);
  CHECK(r.s.moves_this_hold() == 1);
}

TEST_CASE("a press while moving captures nothing") {
  Rig r;
  r.press();
  r.feed_class(GestureClass::XPos);
  REQUIRE(r.s.sim().phase() == MotionPhase::Moving);
  r.s.abandon_hold();
  r.press();
  CHECK_FALSE(r.s.capturing());
  r.feed_class(GestureClass::YPos);
  r.effects();
  r.release();
  // not this hold's move, so release does not stop it
  CHECK(r.s.sim().phase() == MotionPhase::Moving);
}

TEST_CASE("motors off interlock") {
  Rig r;
  r.s.command("ROBOT MOTORS OFF", 1, 0);
  r.effects();
  r.press();
  CHECK(r.s.capturing());
  r.feed_class(GestureClass::XPos);
  const auto e = r.effects();
  CHECK(r.count(e, EffectKind::Move) == 0);
  REQUIRE(find(e, EffectKind::Notice));
  CHECK(find(e, EffectKind::Notice)->reason == "MotorsOff");
}

TEST_CASE("guard stop interlock and reset") {
  SessionConfig cfg;
  cfg.contact = {700.0, 10.0, 0.0};  // plane 100 mm under home
  Rig r(cfg);
  r.press();
  r.feed_class(GestureClass::ZNeg);
  REQUIRE(r.s.sim().phase() == MotionPhase::Moving);
  std::vector<SessionEffect> all;
  for (int i = 0; i < 300 && r.s.guard().phase != GuardPhase::Stopped; ++i) {
    r.step();
    for (auto& e : r.effects()) all.push_back(e);
  }
  REQUIRE(r.s.guard().phase == GuardPhase::Stopped);
  CHECK(r.s.sim().phase() == MotionPhase::Idle);
  CHECK(find(all, EffectKind::VibrateOn));
  const auto* stop = find(all, EffectKind::Stop);
  REQUIRE(stop);
  CHECK(stop->reason == "guard");
  CHECK(stop->text == "fz");
  r.release();
  r.press();
  r.feed_class(GestureClass::ZPos);
  auto e = r.effects();
  CHECK(r.count(e, EffectKind::Move) == 0);
  CHECK(find(e, EffectKind::Notice)->reason == "GuardStopped");
  r.release();
  CHECK(r.s.command("COMPUTER GUARD RESET", 1, r.t) == CommandOutcome::Accepted);
  CHECK(r.s.guard().phase == GuardPhase::Normal);
}

TEST_CASE("mode 1 moves are axis aligned") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    Rig r;
    r.press();
    const auto cls = kAllClasses[rng() % kNumClasses];
    r.feed_class(cls, 4, rng(), 0.05);
    for (const auto& e : r.effects()) {
      if (e.kind != EffectKind::Move) continue;
      int nonzero = 0;
      for (double v : e.increment.i) nonzero += v != 0.0;
      CHECK(nonzero == 1);
    }
  }
}

TEST_CASE("watchdog stops a move") {
  Rig r;
  r.press();
  r.feed_class(GestureClass::XPos);
  REQUIRE(r.s.sim().phase() == MotionPhase::Moving);
  CHECK_FALSE(r.s.watchdog(r.t, r.t - 150, 200));
  CHECK(r.s.watchdog(r.t, r.t - 250, 200));
  CHECK(r.s.sim().phase() == MotionPhase::Idle);
  CHECK(find(r.effects(), EffectKind::Stop)->reason == "watchdog");
  CHECK_FALSE(r.s.watchdog(r.t, r.t - 250, 200));
}

TEST_CASE("clock must advance inside a capture") {
  Rig r;
  r.press();
  r.s.sample({100, 0, 0, 1, true});
  CHECK_THROWS_AS(r.s.sample({100, 0, 0, 1, true}), Error);
}

TEST_CASE("stat recognizer sessions") {
  const auto corpus = generate_corpus(0.05, 30, 2);
  SessionConfig cfg;
  cfg.recognizer = Method::FirstFour;
  Recognizers m;
  m.stat = *train_recognizer(corpus, Method::FirstFour, {}).model.stat;
  Rig r(cfg, m);
  r.press();
  r.feed_class(GestureClass::XNeg);
  const auto* move = find(r.effects(), EffectKind::Move);
  REQUIRE(move);
  CHECK(move->increment.i[0] < 0.0);
  CHECK(r.s.last_recognition()->source == "stat");

  cfg.recognizer = Method::ZeroCrossing;
  CHECK_THROWS_AS(Rig(cfg, m), Error);  // first-four bands under a zero-crossing session
}

TEST_CASE("zero-crossing sessions wait for the crossing") {
  const auto corpus = generate_corpus(0.05, 30, 2);
  SessionConfig cfg;
  cfg.recognizer = Method::ZeroCrossing;
  Recognizers m;
  m.stat = *train_recognizer(corpus, Method::ZeroCrossing, {}).model.stat;
  Rig r(cfg, m);
  r.press();
  r.feed_class(GestureClass::YPos, 6);
  CHECK(r.count(r.effects(), EffectKind::Move) == 0);  // still rising
  Rig q(cfg, m);
  q.press();
  q.feed_class(GestureClass::YPos, 12);
  const auto e = q.effects();
  const auto* move = find(e, EffectKind::Move);
  REQUIRE(move);
  CHECK(move->increment.i[1] > 0.0);

  Rig early(cfg, m);
  early.press();
  early.feed_class(GestureClass::YPos, 5);
  early.release();
  const auto n = early.effects();
  REQUIRE(find(n, EffectKind::Notice));
  CHECK(find(n, EffectKind::Notice)->reason == "NoZeroCrossing");
}

}  // TEST_SUITE
