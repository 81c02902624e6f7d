// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// fails. `gesteach_acceptance 3 7` runs a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "config.hpp"
#include "engine.hpp"
#include "evaluation.hpp"
#include "force_guard.hpp"
#include "mlp.hpp"
#include "program.hpp"
#include "session.hpp"
#include "support.hpp"
#include "workspace.hpp"

using namespace gesteach;
namespace gt = gesteach::testing;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Verdict geometry_oracle() {
  const auto t0 = Clock::now();
  const auto ws = hp6_profile().workspace;
  std::mt19937_64 rng(20240601);
  double worst_rel = 0.0, worst_boundary = 0.0;
  bool in_range = true;
  std::size_t clamped = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = gt::random_shell_point(ws, rng);
    const Vec3 u = gt::random_unit(rng);
    const double k = ray_workspace_exit(ws, p, {u});
    const double oracle = gt::bisection_exit(ws, p, u);
    worst_rel = std::max(worst_rel, std::abs(k - oracle) / std::max(1.0, oracle));
    in_range = in_range && k >= 0.0 && k <= 2012.0;
    if (k >= ws.k_max) {
      ++clamped;  // stopped by k_max inside the shell, not on a sphere
      continue;
    }
    const double r = norm(p + k * u);
    const double off = std::min(std::abs(r - ws.r_ext) / ws.r_ext, std::abs(r - ws.r_int) / ws.r_int);
    worst_boundary = std::max(worst_boundary, off);
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = worst_rel <= 1e-6 && worst_boundary <= 1e-6 && in_range && secs < 5.0;
  v.detail = "max_rel_err=" + fmt("%.3g", worst_rel) + " max_boundary_err=" + fmt("%.3g", worst_boundary) +
             " k_in_[0,2012]=" + (in_range ? "yes" : "no") + " clamped=" + std::to_string(clamped) +
             " runtime_s=" + fmt("%.2f", secs);
  return v;
}

Verdict gradient() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::uint64_t m = 1; m <= 10; ++m) {
    const auto model = gt::random_model(1000 + m);
    const auto pats = gt::random_patterns(2000 + m, 10);
    worst = std::max(worst, gradient_check(model, pats));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-4 && secs < 10.0,
          "max_rel_err=" + fmt("%.3g", worst) + " runtime_s=" + fmt("%.2f", secs)};
}

Verdict recognition() {
  const auto t0 = Clock::now();
  ProtocolOptions o;  // Method 3, 30 patterns, 0.05 g, seeds 1..5, 10000 cycles, mse 1e-3
  const auto main_run = run_protocol(o);
  const auto rows = sweep_patterns(o, {20, 30, 60, 70});
  bool monotone = true;
  std::string curve;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].mean_rate < rows[i - 1].mean_rate) monotone = false;
    curve += (i ? "," : "") + std::to_string(rows[i].patterns) + ":" + fmt("%.2f", 100.0 * rows[i].mean_rate);
  }
  const double secs = seconds_since(t0);
  const bool rate_ok = main_run.mean_rate >= 0.95;
  return {rate_ok && monotone && secs < 600.0,
          "mean_held_out=" + fmt("%.2f%%", 100.0 * main_run.mean_rate) + (rate_ok ? " (>=95 ok)" : " (<95)") +
              " sweep=" + curve + (monotone ? " non-decreasing" : " NOT non-decreasing") +
              " runtime_s=" + fmt("%.1f", secs)};
}

Verdict comparison() {
  ProtocolOptions o;
  o.seeds = {1};
  const auto cmp = compare_methods(o);
  const auto text = format_comparison(cmp);
  std::istringstream in(text);
  std::string line;
  std::size_t class_rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line == "class\tmethod1_pct\tmethod2_pct\tmethod3_pct") header = true;
    for (auto c : kAllClasses) {
      if (line.rfind(std::string(class_label(c)) + "\t", 0) == 0) {
        ++class_rows;
        break;
      }
    }
  }
  const double w1 = cmp.methods[0].per_seed[0].mean_window_length;
  const double w2 = cmp.methods[1].per_seed[0].mean_window_length;
  const double w3 = cmp.methods[2].per_seed[0].mean_window_length;
  const bool windows_differ = w2 == 4.0 && w3 == 4.0 && w1 != 4.0;
  return {header && class_rows == kNumClasses && windows_differ,
          "class_rows=" + std::to_string(class_rows) + " window_len m1=" + fmt("%.2f", w1) +
              " m2=" + fmt("%.2f", w2) + " m3=" + fmt("%.2f", w3) + " rates m1/m2/m3=" +
              fmt("%.1f", 100 * cmp.methods[0].mean_rate) + "/" + fmt("%.1f", 100 * cmp.methods[1].mean_rate) +
              "/" + fmt("%.1f", 100 * cmp.methods[2].mean_rate)};
}

Verdict force_guard() {
  const ForceThresholds th(10.0, 0.2);
  auto run = [&](const std::vector<double>& ramp) {
    GuardState s;
    std::string trace;
    for (double f : ramp) {
      ForceReading r;
      r.fz = f;
      const auto u = update_guard(s, r, th);
      s = u.state;
      trace += guard_phase_name(s.phase);
      for (auto e : u.effects) trace += std::string("(") + guard_effect_name(e) + ")";
      trace += ' ';
    }
    return trace;
  };
  const auto stop = run({0, 9, 11, 12});
  const auto recover = run({0, 9, 11, 11.5, 9});
  // reaching the stop level also silences the vibration
  const bool stop_ok = stop == "Normal Normal Alert(VibrateOn) Stopped(StopRobot)(VibrateOff) ";
  const bool recover_ok = recover == "Normal Normal Alert(VibrateOn) Alert Normal(VibrateOff) ";
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> fa(0.01, 1000.0), p(0.0, 1.0);
  int exact = 0;
  for (int i = 0; i < 100; ++i) {
    const double a = fa(rng), pp = p(rng);
    exact += ForceThresholds(a, pp).force_stop() == a * (1.0 + pp);
  }
  return {stop_ok && recover_ok && exact == 100,
          "stop_ramp=[" + stop + "] recovery=[" + recover + "] identity_exact=" + std::to_string(exact) + "/100"};
}

Verdict latency() {
  Recognizers models;
  models.ann = gt::shared_ann();
  const GeneratorProfile gp;
  double worst_internal = 0.0, worst_external = 0.0;
  int moves = 0;
  for (int i = 0; i < 200; ++i) {
    TeachSession s(SessionConfig{}, hp6_profile(), models);
    const auto cls = i % 2 ? GestureClass::XPos : GestureClass::ZNeg;
    const auto trace = generate_synthetic(cls, 0.02, 100 + i, gp);
    s.button(true, 0);
    for (std::size_t k = 0; k < 3; ++k) {
      auto a = trace.samples[gp.lead_in + k];
      a.t_ms = 10 * static_cast<std::int64_t>(k + 1);
      s.sample(a);
    }
    auto a = trace.samples[gp.lead_in + 3];
    a.t_ms = 40;
    const auto t0 = Clock::now();
    s.sample(a);
    const double external = 1000.0 * seconds_since(t0);
    if (s.sim().phase() != MotionPhase::Moving || !s.last_latency_ms()) continue;
    ++moves;
    worst_internal = std::max(worst_internal, *s.last_latency_ms());
    worst_external = std::max(worst_external, external);
  }
  return {moves == 200 && worst_internal < 20.0 && worst_external < 20.0,
          "moves=" + std::to_string(moves) + "/200 max_latency_ms=" + fmt("%.4f", worst_internal) +
              " max_wall_ms=" + fmt("%.4f", worst_external)};
}

Verdict watchdog() {
  Recognizers models;
  models.ann = gt::shared_ann();
  SessionConfig cfg;
  ScriptedSession s(cfg, hp6_profile(), models);
  gt::Operator op(s);
  op.press();
  const GeneratorProfile gp;
  const auto trace = generate_synthetic(GestureClass::YNeg, 0.0, 1, gp);
  for (int i = 0; i < 4; ++i) {
    const auto& a = trace.samples[gp.lead_in + i];
    s.send(op.conn(), {{"kind", "InputSample"}, {"t_ms", 10 * (i + 1)}, {"ax", a.ax}, {"ay", a.ay}, {"az", a.az}});
    op.tick();
  }
  op.tick(10);
  const bool moving = s.engine().session().sim().phase() == MotionPhase::Moving;
  const std::int64_t t0 = s.engine().last_heartbeat_ms();
  op.silent(40);
  const auto log = s.finish();
  // Judge the replayed transcript, not the live one.
  const auto replay = replay_log(log);
  std::optional<std::int64_t> idle_at;
  for (const auto& t : gt::telemetry_of(replay.transcript)) {
    if (t.t_ms > t0 && t.motion == "Idle") {
      idle_at = t.t_ms;
      break;
    }
  }
  const std::int64_t bound = t0 + cfg.watchdog_timeout_ms + cfg.tick_ms;
  const bool ok = moving && idle_at && *idle_at <= bound;
  return {ok, "last_heartbeat_ms=" + std::to_string(t0) + " idle_at_ms=" +
                  (idle_at ? std::to_string(*idle_at) : std::string("never")) + " bound_ms=" + std::to_string(bound) +
                  " watchdog_effect=" + (replay.transcript.find("\"reason\":\"watchdog\"") != std::string::npos ? "yes" : "no")};
}

Verdict determinism() {
  const auto run = gt::run_teach_pipeline(gt::shared_ann());
  const auto a = replay_log(run.log);
  const auto b = replay_log(run.log);
  const bool transcripts = a.transcript == b.transcript && !a.transcript.empty();
  const bool programs = a.program_text && b.program_text && *a.program_text == *b.program_text;
  return {transcripts && programs,
          "transcript_bytes=" + std::to_string(a.transcript.size()) + " identical=" + (transcripts ? "yes" : "no") +
              " program_identical=" + (programs ? "yes" : "no")};
}

Verdict pipeline() {
  const auto run = gt::run_teach_pipeline(gt::shared_ann());
  if (run.waypoints.size() != 2 || !run.program) {
    return {false, "waypoints=" + std::to_string(run.waypoints.size()) + " program=" + (run.program ? "yes" : "no")};
  }
  auto dist = [](const Pose& a, const Pose& b) { return norm(a.position() - b.position()); };
  const Pose& target = run.waypoints[1].pose;
  const double live_err = dist(run.final_pose, target);
  // And once more on a fresh controller.
  const auto prof = hp6_profile();
  RobotSim sim(prof.workspace, prof.home);
  const auto replay = replay_program(sim, *run.program, SessionConfig{}.force_thresholds());
  const double fresh_err = dist(replay.final_pose, target);
  const bool ok = run.program->statements.size() == 2 && run.run_complete && live_err <= 1e-6 && fresh_err <= 1e-6;
  return {ok, "statements=" + std::to_string(run.program->statements.size()) + " run_complete=" +
                  (run.run_complete ? "yes" : "no") + " final_err_mm=" + fmt("%.3g", live_err) +
                  " fresh_replay_err_mm=" + fmt("%.3g", fresh_err)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"geometry oracle", geometry_oracle},
      {"backprop gradient check", gradient},
      {"recognition at desk scale", recognition},
      {"method comparison report", comparison},
      {"force guard", force_guard},
      {"gesture to motion latency", latency},
      {"watchdog", watchdog},
      {"replay determinism", determinism},
      {"pipeline composition", pipeline},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(n)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all = all && v.pass;
    std::printf("criterion %d %-28s %s  %s\n", n, criteria[i].first, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
