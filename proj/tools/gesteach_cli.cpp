// gesteach command-line tool. Talks to the library only through gesteach.h.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gesteach/gesteach.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitDivergence = 4;

struct Failure {
  int exit_code;
};

int exit_code_for(gt_status s) {
  switch (s) {
    case GT_OK:
      return kExitOk;
    case GT_E_DIVERGENCE:
      return kExitDivergence;
    case GT_E_INVALID_ARGUMENT:
    case GT_E_UNKNOWN_VERB:
      return kExitUsage;
    default:
      return kExitData;
  }
}

void check(gt_status s) {
  if (s == GT_OK) return;
  std::fprintf(stderr, "gesteach: %s: %s\n", gt_status_name(s), gt_last_error());
  throw Failure{exit_code_for(s)};
}

[[noreturn]] void fail(int code, const std::string& message) {
  std::fprintf(stderr, "gesteach: %s\n", message.c_str());
  throw Failure{code};
}

// Owns a library string.
struct Text {
  char* p = nullptr;
  ~Text() { gt_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kExitData, "cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) fail(kExitData, "cannot write " + path);
}

// Session settings: config file first, then environment, then flags.
struct SessionFlags {
  std::string config_path;
  std::optional<std::string> profile;
  std::optional<std::int64_t> timeout_ms;
  std::optional<int> mode;
  std::optional<std::string> endpoint;

  nlohmann::json config() const {
    nlohmann::json j = nlohmann::json::object();
    if (!config_path.empty()) {
      try {
        j = nlohmann::json::parse(slurp(config_path));
      } catch (const nlohmann::json::exception& e) {
        fail(kExitData, config_path + ": " + e.what());
      }
      if (!j.is_object()) fail(kExitData, config_path + ": expected a JSON object");
    }
    if (const char* env = std::getenv("GESTEACH_TIMEOUT_MS"); env && *env) {
      try {
        j["watchdog_timeout_ms"] = std::stoll(env);
      } catch (const std::exception&) {
        fail(kExitUsage, std::string("GESTEACH_TIMEOUT_MS is not a number: ") + env);
      }
    }
    if (profile) j["profile"] = *profile;
    if (timeout_ms) j["watchdog_timeout_ms"] = *timeout_ms;
    if (mode) j["mode"] = *mode;
    return j;
  }

  std::string resolved_endpoint() const {
    if (endpoint) return *endpoint;
    if (const char* env = std::getenv("GESTEACH_ENDPOINT"); env && *env) return env;
    return "127.0.0.1:8765";
  }
};

struct EvalFlags {
  int method = 3;
  std::size_t patterns = 30;
  double noise = 0.05;
  std::uint64_t seed = 1;
  std::size_t seeds = 5;
  std::size_t cycles = 10000;
  double target_mse = 1e-3;

  std::vector<std::uint64_t> seed_list() const {
    std::vector<std::uint64_t> v;
    for (std::size_t i = 0; i < seeds; ++i) v.push_back(seed + i);
    return v;
  }

  gt_eval_options options(const std::vector<std::uint64_t>& seed_list) const {
    gt_eval_options o;
    gt_eval_options_default(&o);
    o.method = method;
    o.patterns = patterns;
    o.noise = noise;
    o.seeds = seed_list.data();
    o.n_seeds = seed_list.size();
    o.train.cycles = cycles;
    o.train.target_mse = target_mse;
    return o;
  }
};

volatile std::sig_atomic_t g_interrupted = 0;

extern "C" void on_signal(int) { g_interrupted = 1; }

std::vector<std::size_t> parse_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(item, &used);
      if (used != item.size() || v == 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      fail(kExitUsage, "bad pattern count '" + item + "'");
    }
  }
  if (out.empty()) fail(kExitUsage, "empty pattern list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gesteach: gesture teaching against a simulated robot controller"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gt_version());

  // gen-corpus
  double gc_noise = 0.05;
  std::size_t gc_patterns = 30;
  std::uint64_t gc_seed = 1;
  std::string gc_out;
  auto* gen = app.add_subcommand("gen-corpus", "Write a synthetic labeled corpus");
  gen->add_option("--noise", gc_noise, "Noise sigma in g")->check(CLI::NonNegativeNumber);
  gen->add_option("--patterns", gc_patterns, "Traces per class")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gc_seed, "Generator seed");
  gen->add_option("--out", gc_out, "Output directory")->required();

  // train
  std::string tr_corpus, tr_out;
  int tr_method = 3;
  gt_train_options tr_opts;
  gt_train_options_default(&tr_opts);
  auto* train = app.add_subcommand("train", "Train a recognizer from a corpus manifest");
  train->add_option("--corpus", tr_corpus, "Corpus manifest.csv")->required();
  train->add_option("--method", tr_method, "1 zero-crossing bands, 2 first-four bands, 3 network")
      ->check(CLI::IsMember({1, 2, 3}));
  train->add_option("--cycles", tr_opts.cycles, "Maximum training cycles")->check(CLI::PositiveNumber);
  train->add_option("--target-mse", tr_opts.target_mse, "Early stop MSE");
  train->add_option("--learning-rate", tr_opts.learning_rate, "Backprop learning rate")
      ->check(CLI::PositiveNumber);
  train->add_option("--momentum", tr_opts.momentum, "Backprop momentum")->check(CLI::NonNegativeNumber);
  train->add_option("--seed", tr_opts.seed, "Weight init seed");
  train->add_option("--out", tr_out, "Model file")->required();

  // eval
  EvalFlags ev;
  std::string ev_model, ev_corpus, ev_sweep;
  bool ev_compare = false;
  auto* eval = app.add_subcommand(
      "eval", "Score a model on a corpus, or run the seeded train/held-out protocol");
  eval->add_option("--model", ev_model, "Model file (with --corpus)");
  eval->add_option("--corpus", ev_corpus, "Corpus manifest.csv (with --model)");
  eval->add_option("--method", ev.method, "Method for the protocol")->check(CLI::IsMember({1, 2, 3}));
  eval->add_option("--patterns", ev.patterns, "Training patterns per class")->check(CLI::PositiveNumber);
  eval->add_option("--noise", ev.noise, "Noise sigma in g")->check(CLI::NonNegativeNumber);
  eval->add_option("--seed", ev.seed, "First seed");
  eval->add_option("--seeds", ev.seeds, "Number of consecutive seeds")->check(CLI::PositiveNumber);
  eval->add_option("--cycles", ev.cycles, "Maximum training cycles")->check(CLI::PositiveNumber);
  eval->add_option("--target-mse", ev.target_mse, "Early stop MSE");
  eval->add_flag("--compare", ev_compare, "Methods 1, 2 and 3 side by side");
  eval->add_option("--sweep", ev_sweep, "Comma separated pattern counts, e.g. 20,30,60,70");

  // serve
  SessionFlags sv;
  std::string sv_record, sv_program;
  auto* serve = app.add_subcommand("serve", "Run the gateway and simulator until interrupted");
  serve->add_option("--config", sv.config_path, "Session config JSON");
  serve->add_option("--profile", sv.profile, "hp6, irb140 or a profile JSON path");
  serve->add_option("--endpoint", sv.endpoint, "host:port (env GESTEACH_ENDPOINT)");
  serve->add_option("--timeout-ms", sv.timeout_ms, "Heartbeat watchdog timeout (env GESTEACH_TIMEOUT_MS)")
      ->check(CLI::PositiveNumber);
  serve->add_option("--mode", sv.mode, "Teaching mode")->check(CLI::IsMember({1, 2}));
  serve->add_option("--record", sv_record, "Session log to write");
  serve->add_option("--program", sv_program, "Write the generated program here on exit");

  // replay
  std::string rp_log, rp_transcript, rp_program;
  double rp_pace = 0.0;
  auto* replay = app.add_subcommand("replay", "Re-run a recorded session log");
  replay->add_option("--log", rp_log, "Session log")->required();
  replay->add_option("--pace", rp_pace, "0 flat out, k for k times real time")
      ->check(CLI::NonNegativeNumber);
  replay->add_option("--transcript", rp_transcript, "Write the telemetry transcript here");
  replay->add_option("--program", rp_program, "Write the generated program here");

  // run-program
  SessionFlags rn;
  std::string rn_program;
  auto* run = app.add_subcommand("run-program", "Execute program text on a fresh simulator");
  run->add_option("--program", rn_program, "Program text file")->required();
  run->add_option("--config", rn.config_path, "Session config JSON");
  run->add_option("--profile", rn.profile, "hp6, irb140 or a profile JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      gt_corpus* c = nullptr;
      check(gt_corpus_generate(gc_noise, gc_patterns, gc_seed, &c));
      const gt_status s = gt_corpus_save(c, gc_out.c_str());
      const std::size_t n = gt_corpus_size(c);
      gt_corpus_free(c);
      check(s);
      std::printf("wrote %zu traces to %s (seed %llu, noise %g)\n", n, gc_out.c_str(),
                  static_cast<unsigned long long>(gc_seed), gc_noise);
    } else if (*train) {
      gt_corpus* c = nullptr;
      check(gt_corpus_load(tr_corpus.c_str(), &c));
      gt_model* m = nullptr;
      gt_train_report r{};
      const gt_status s = gt_model_train(c, tr_method, &tr_opts, &m, &r);
      gt_corpus_free(c);
      check(s);
      const gt_status w = gt_model_save(m, tr_out.c_str());
      gt_model_free(m);
      check(w);
      std::printf("# seed=%llu method=%d\n", static_cast<unsigned long long>(tr_opts.seed), tr_method);
      std::printf("windows\t%zu\n", r.windows);
      if (tr_method == 3) std::printf("cycles\t%zu\nfinal_mse\t%.6g\n", r.cycles, r.final_mse);
      std::printf("model\t%s\n", tr_out.c_str());
    } else if (*eval) {
      Text report;
      if (!ev_model.empty() || !ev_corpus.empty()) {
        if (ev_model.empty() || ev_corpus.empty()) fail(kExitUsage, "--model and --corpus go together");
        gt_model* m = nullptr;
        check(gt_model_load(ev_model.c_str(), &m));
        gt_corpus* c = nullptr;
        const gt_status lc = gt_corpus_load(ev_corpus.c_str(), &c);
        if (lc != GT_OK) gt_model_free(m);
        check(lc);
        gt_eval_options d;
        gt_eval_options_default(&d);
        const gt_status s = gt_evaluate(m, c, d.accept_threshold, &report.p, nullptr);
        gt_model_free(m);
        gt_corpus_free(c);
        check(s);
      } else {
        const auto seeds = ev.seed_list();
        const auto o = ev.options(seeds);
        if (!ev_sweep.empty()) {
          const auto counts = parse_list(ev_sweep);
          check(gt_eval_sweep(&o, counts.data(), counts.size(), &report.p, nullptr));
        } else if (ev_compare) {
          check(gt_eval_compare(&o, &report.p, nullptr));
        } else {
          check(gt_eval_protocol(&o, &report.p, nullptr));
        }
      }
      std::fputs(report.str().c_str(), stdout);
    } else if (*serve) {
      const std::string cfg = sv.config().dump();
      const std::string endpoint = sv.resolved_endpoint();
      gt_server* s = nullptr;
      check(gt_server_start(cfg.c_str(), nullptr, endpoint.c_str(),
                            sv_record.empty() ? nullptr : sv_record.c_str(), &s));
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::printf("listening on port %d\n", gt_server_port(s));
      std::fflush(stdout);
      while (!g_interrupted && gt_server_wait(s, 100) == 0) {
      }
      gt_server_stop(s);
      Text prog;
      const gt_status ps = gt_server_program(s, &prog.p);
      gt_server_free(s);
      if (!sv_program.empty()) {
        if (ps == GT_OK) {
          spit(sv_program, prog.str());
          std::printf("program written to %s\n", sv_program.c_str());
        } else {
          std::printf("no program generated\n");
        }
      }
    } else if (*replay) {
      Text transcript, program;
      check(gt_replay(rp_log.c_str(), rp_pace, &transcript.p, &program.p));
      if (!rp_transcript.empty()) spit(rp_transcript, transcript.str());
      if (!rp_program.empty()) {
        if (!program.p) fail(kExitData, "the session generated no program");
        spit(rp_program, program.str());
      }
      if (rp_transcript.empty() && rp_program.empty()) std::fputs(transcript.str().c_str(), stdout);
    } else if (*run) {
      const std::string text = slurp(rn_program);
      const std::string cfg = rn.config().dump();
      double pose[6];
      check(gt_program_run(text.c_str(), cfg.c_str(), nullptr, pose));
      std::printf("final_pose\t%.6f\t%.6f\t%.6f\t%.6f\t%.6f\t%.6f\n", pose[0], pose[1], pose[2],
                  pose[3], pose[4], pose[5]);
    }
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return kExitOk;
}
