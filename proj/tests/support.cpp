#include "support.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evaluation.hpp"

namespace gesteach::testing {

double bisection_exit(const Workspace& ws, Vec3 pos, Vec3 u, double step) {
  // strict shell test, no tolerance borrowed from Workspace::contains
  const auto inside_shell = [&](Vec3 q) {
    const double r2 = q.x * q.x + q.y * q.y + q.z * q.z;
    return r2 <= ws.r_ext * ws.r_ext && r2 >= ws.r_int * ws.r_int;
  };
  const double limit = ws.k_max;
  double inside = 0.0;
  double k = step;
  for (;; k += step) {
    if (k >= limit) {
      if (inside_shell(pos + limit * u)) return limit;
      k = limit;
      break;
    }
    if (!inside_shell(pos + k * u)) break;
    inside = k;
  }
  double lo = inside;
  double hi = k;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (inside_shell(pos + mid * u)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

OutputVector reference_forward(const std::vector<double>& p, const InputVector& x) {
  // [W1 (20x12) | b1 (20) | W2 (12x20) | b2 (12)]
  const std::size_t w1 = 0, b1 = 240, w2 = 260, b2 = 500;
  double h[20];
  for (int i = 0; i < 20; ++i) {
    double s = p[b1 + i];
    for (int j = 0; j < 12; ++j) s += p[w1 + 12 * i + j] * x[j];
    h[i] = 1.0 / (1.0 + std::exp(-s));
  }
  OutputVector y{};
  for (int k = 0; k < 12; ++k) {
    double s = p[b2 + k];
    for (int i = 0; i < 20; ++i) s += p[w2 + 20 * k + i] * h[i];
    y[k] = 1.0 / (1.0 + std::exp(-s));
  }
  return y;
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    const Vec3 v{n(rng), n(rng), n(rng)};
    const double len = norm(v);
    if (len > 1e-9) return v / len;
  }
}

Vec3 random_shell_point(const Workspace& ws, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-ws.r_ext, ws.r_ext);
  for (;;) {
    const Vec3 p{d(rng), d(rng), d(rng)};
    const double r = norm(p);
    if (r < ws.r_ext * (1 - 1e-6) && r > ws.r_int * (1 + 1e-6)) return p;
  }
}

MlpModel random_model(std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-scale, scale);
  MlpModel m;
  for (auto& w : m.params) w = d(rng);
  return m;
}

std::vector<Pattern> random_patterns(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> x(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> cls(0, kOutputs - 1);
  std::vector<Pattern> out(n);
  for (auto& p : out) {
    for (auto& v : p.input) v = x(rng);
    p.target[cls(rng)] = 1.0;
  }
  return out;
}

const MlpModel& shared_ann() {
  static const MlpModel model = [] {
    const auto corpus = generate_corpus(0.05, 30, 1);
    auto r = train_recognizer(corpus, Method::Neural, TrainOptions{});
    return *r.model.ann;
  }();
  return model;
}

std::vector<TelemetryView> telemetry_of(const std::string& transcript) {
  std::vector<TelemetryView> out;
  std::istringstream in(transcript);
  std::string line;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    if (j.at("kind") != "Telemetry") continue;
    TelemetryView v;
    v.t_ms = j.at("t_ms");
    v.motion = j.at("motion");
    v.guard = j.at("guard");
    const auto& p = j.at("pose");
    v.pose = {p[0], p[1], p[2], p[3], p[4], p[5]};
    v.waypoints = j.at("waypoints");
    v.program = j.at("program");
    out.push_back(v);
  }
  return out;
}

Operator::Operator(ScriptedSession& s) : s_(s), conn_(s.connect_operator()) { tick(); }

void Operator::tick(std::size_t n) { s_.run(n, conn_); }

void Operator::silent(std::size_t n) { s_.run(n); }

void Operator::command(const std::string& text, double confidence) {
  s_.send(conn_, {{"kind", "Command"}, {"text", text}, {"confidence", confidence}});
  tick();
}

void Operator::press() {
  s_.send(conn_, {{"kind", "ButtonEdge"}, {"pressed", true}});
  tick();
}

void Operator::release() {
  s_.send(conn_, {{"kind", "ButtonEdge"}, {"pressed", false}});
  tick();
}

void Operator::gesture(GestureClass cls, std::size_t hold_ticks, std::uint64_t seed) {
  const GeneratorProfile profile;
  const auto trace = generate_synthetic(cls, 0.0, seed, profile);
  press();
  const std::size_t end = std::min(trace.samples.size(), profile.lead_in + profile.crossing + 4);
  for (std::size_t i = profile.lead_in; i < end; ++i) {
    const auto& a = trace.samples[i];
    sample_clock_ += 10;
    s_.send(conn_, {{"kind", "InputSample"}, {"t_ms", sample_clock_}, {"ax", a.ax}, {"ay", a.ay}, {"az", a.az}});
    tick();
  }
  tick(hold_ticks);
  release();
}

PipelineRun run_teach_pipeline(const MlpModel& ann, const std::string& profile) {
  SessionConfig cfg;
  cfg.profile = profile;
  Recognizers models;
  models.ann = ann;
  ScriptedSession s(cfg, resolve_profile(profile), models);
  Operator op(s);

  op.gesture(GestureClass::XPos, 40);
  op.command("COMPUTER MOVE LINE");
  op.gesture(GestureClass::YPos, 60);
  op.command("COMPUTER MOVE LINE");
  op.command("COMPUTER GENERATE");
  op.command("COMPUTER RUN");

  PipelineRun out;
  const auto& session = s.engine().session();
  for (std::size_t i = 0; i < 20000 && session.program_running(); ++i) {
    op.tick();
    ++out.ticks_to_finish;
  }
  op.tick();
  out.run_complete = !session.program_running();
  out.waypoints = session.waypoints();
  out.program = session.program();
  if (out.program) out.program_text = program_text(*out.program);
  out.final_pose = session.sim().pose();
  out.log = s.finish();
  return out;
}

}  // namespace gesteach::testing
