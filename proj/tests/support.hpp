#pragma once

// Oracles and scripted-session helpers shared by the unit tests and the
// acceptance runner. Nothing here calls the code path it checks.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "config.hpp"
#include "engine.hpp"
#include "mlp.hpp"
#include "program.hpp"
#include "workspace.hpp"

namespace gesteach::testing {

// Ray exit by marching along u on a strict shell test and bisecting the
// first step that leaves. Clamped to k_max like the real thing.
double bisection_exit(const Workspace& ws, Vec3 pos, Vec3 u, double step = 0.25);

// Forward pass straight off the flat parameter layout with plain loops.
OutputVector reference_forward(const std::vector<double>& params, const InputVector& x);

// Uniform point in the shell r_int < |p| < r_ext.
Vec3 random_shell_point(const Workspace& ws, std::mt19937_64& rng);
Vec3 random_unit(std::mt19937_64& rng);

MlpModel random_model(std::uint64_t seed, double scale = 1.0);
std::vector<Pattern> random_patterns(std::uint64_t seed, std::size_t n);

// Network trained on the seed-1 synthetic corpus at 0.05 g, cached.
const MlpModel& shared_ann();

struct TelemetryView {
  std::int64_t t_ms = 0;
  std::string motion;
  std::string guard;
  Pose pose;
  std::size_t waypoints = 0;
  std::string program;
};
std::vector<TelemetryView> telemetry_of(const std::string& transcript);

// Drives an operator through an engine the way a client would.
class Operator {
 public:
  explicit Operator(ScriptedSession& s);
  std::uint32_t conn() const { return conn_; }
  void tick(std::size_t n = 1);            // heartbeat each tick
  void silent(std::size_t n);              // no heartbeats
  void command(const std::string& text, double confidence = 1.0);
  // Press, stream the synthetic gesture one sample per tick from the press,
  // keep holding for hold_ticks more, release.
  void gesture(GestureClass cls, std::size_t hold_ticks, std::uint64_t seed = 11);
  void press();
  void release();

 private:
  ScriptedSession& s_;
  std::uint32_t conn_;
  std::int64_t sample_clock_ = 0;
};

struct PipelineRun {
  std::string log;
  std::vector<Waypoint> waypoints;
  std::optional<RobotProgram> program;
  std::optional<std::string> program_text;
  Pose final_pose;
  bool run_complete = false;
  std::size_t ticks_to_finish = 0;
};

// Press, X+, release, MOVE LINE, the same for Y+, GENERATE, RUN, wait.
PipelineRun run_teach_pipeline(const MlpModel& ann, const std::string& profile = "hp6");

}  // namespace gesteach::testing
