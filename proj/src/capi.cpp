#include "gesteach/gesteach.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "config.hpp"
#include "engine.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "program.hpp"
#include "server.hpp"
#include "trace_io.hpp"

using namespace gesteach;

struct gt_corpus {
  std::vector<LabeledTrace> traces;
};

struct gt_model {
  RecognizerModel model;
};

struct gt_engine {
  std::unique_ptr<Engine> engine;
  std::ofstream log;
};

struct gt_server {
  std::unique_ptr<GatewayServer> server;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
gt_status wrap(F&& f) {
  try {
    f();
    return GT_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<gt_status>(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return GT_E_PARSE;
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return GT_E_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return GT_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GT_E_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

SessionConfig parse_config(const char* config_json) {
  if (!config_json || !*config_json) return SessionConfig{};
  return session_config_from_json(nlohmann::json::parse(config_json));
}

Recognizers load_models(const SessionConfig& cfg) {
  Recognizers r;
  if (!cfg.stat_model_path.empty()) {
    auto m = recognizer_from_json(read_text_file(cfg.stat_model_path));
    if (!m.stat) throw Error(ErrorCode::InvalidArgument, cfg.stat_model_path + " is not a band model");
    r.stat = std::move(m.stat);
  }
  if (!cfg.ann_model_path.empty()) {
    auto m = recognizer_from_json(read_text_file(cfg.ann_model_path));
    if (!m.ann) throw Error(ErrorCode::InvalidArgument, cfg.ann_model_path + " is not a network model");
    r.ann = std::move(m.ann);
  }
  return r;
}

std::unique_ptr<Engine> build_engine(const char* config_json, const char* profile) {
  SessionConfig cfg = parse_config(config_json);
  if (profile && *profile) cfg.profile = profile;
  return std::make_unique<Engine>(cfg, resolve_profile(cfg.profile), load_models(cfg));
}

ProtocolOptions to_protocol(const gt_eval_options* o) {
  require(o != nullptr, "options must not be NULL");
  ProtocolOptions p;
  const auto m = method_from_int(o->method);
  require(m.has_value(), "method must be 1, 2 or 3");
  p.method = *m;
  p.patterns = o->patterns;
  p.noise = o->noise;
  if (o->seeds) {
    require(o->n_seeds > 0, "n_seeds must be positive");
    p.seeds.assign(o->seeds, o->seeds + o->n_seeds);
  }
  p.train.cycles = o->train.cycles;
  p.train.target_mse = o->train.target_mse;
  p.train.learning_rate = o->train.learning_rate;
  p.train.momentum = o->train.momentum;
  p.accept_threshold = o->accept_threshold;
  require(!(p.noise < 0.0), "noise must be >= 0");
  return p;
}

}  // namespace

extern "C" {

GT_API const char* gt_version(void) { return "0.1.0"; }

GT_API const char* gt_status_name(gt_status status) {
  return error_code_name(static_cast<ErrorCode>(status));
}

GT_API const char* gt_last_error(void) { return g_last_error.c_str(); }

GT_API void gt_string_free(char* s) { std::free(s); }

GT_API gt_status gt_corpus_generate(double noise_sigma, size_t per_class, uint64_t seed,
                                    gt_corpus** out) {
  return wrap([&] {
    require(out != nullptr, "out must not be NULL");
    require(per_class > 0, "per_class must be positive");
    auto c = std::make_unique<gt_corpus>();
    c->traces = generate_corpus(noise_sigma, per_class, seed);
    *out = c.release();
  });
}

GT_API gt_status gt_corpus_load(const char* manifest_path, gt_corpus** out) {
  return wrap([&] {
    require(manifest_path && out, "arguments must not be NULL");
    auto c = std::make_unique<gt_corpus>();
    c->traces = load_labeled_traces(manifest_path);
    *out = c.release();
  });
}

GT_API gt_status gt_corpus_save(const gt_corpus* corpus, const char* dir) {
  return wrap([&] {
    require(corpus && dir, "arguments must not be NULL");
    const std::filesystem::path root(dir);
    std::filesystem::create_directories(root / "traces");
    std::vector<ManifestEntry> entries;
    char name[32];
    for (std::size_t i = 0; i < corpus->traces.size(); ++i) {
      const auto& t = corpus->traces[i];
      std::snprintf(name, sizeof name, "%04zu.csv", i);
      save_trace(t.trace, root / "traces" / name);
      entries.push_back({std::string("traces/") + name, t.press_index, t.label});
    }
    save_manifest(entries, root / "manifest.csv");
  });
}

GT_API size_t gt_corpus_size(const gt_corpus* corpus) { return corpus ? corpus->traces.size() : 0; }

GT_API void gt_corpus_free(gt_corpus* corpus) { delete corpus; }

GT_API void gt_train_options_default(gt_train_options* o) {
  if (!o) return;
  const TrainOptions d;
  *o = {d.cycles, d.target_mse, d.learning_rate, d.momentum, d.seed};
}

GT_API gt_status gt_model_train(const gt_corpus* corpus, int method,
                                const gt_train_options* options, gt_model** out,
                                gt_train_report* report) {
  return wrap([&] {
    require(corpus && out, "arguments must not be NULL");
    const auto m = method_from_int(method);
    require(m.has_value(), "method must be 1, 2 or 3");
    TrainOptions to;
    if (options) {
      to = {options->cycles, options->target_mse, options->learning_rate, options->momentum,
            options->seed};
    }
    require(to.cycles >= 1, "cycles must be >= 1");
    require(to.learning_rate > 0.0, "learning rate must be > 0");
    auto r = train_recognizer(corpus->traces, *m, to);
    if (report) *report = {r.windows, r.cycles, r.final_mse};
    *out = new gt_model{std::move(r.model)};
  });
}

GT_API gt_status gt_model_load(const char* path, gt_model** out) {
  return wrap([&] {
    require(path && out, "arguments must not be NULL");
    *out = new gt_model{recognizer_from_json(read_text_file(path))};
  });
}

GT_API gt_status gt_model_save(const gt_model* model, const char* path) {
  return wrap([&] {
    require(model && path, "arguments must not be NULL");
    write_text_file(path, recognizer_to_json(model->model));
  });
}

GT_API int gt_model_method(const gt_model* model) {
  return model ? static_cast<int>(model->model.method) : 0;
}

GT_API void gt_model_free(gt_model* model) { delete model; }

GT_API gt_status gt_model_classify(const gt_model* model, const int64_t* t_ms, const double* ax,
                                   const double* ay, const double* az, const int* b, size_t n,
                                   size_t press_index, char* label, size_t label_size) {
  return wrap([&] {
    require(model && t_ms && ax && ay && az && b && label, "arguments must not be NULL");
    require(label_size >= 16, "label buffer must hold 16 bytes");
    LabeledTrace t;
    t.press_index = press_index;
    for (std::size_t i = 0; i < n; ++i) {
      t.trace.samples.push_back(clamp_sample({t_ms[i], ax[i], ay[i], az[i], b[i] != 0}));
    }
    validate_clock(t.trace);
    const auto cls = recognize_trace(model->model, t);
    const std::string text =
        cls == GestureClass::Unrecognized ? "Unrecognized" : std::string(class_label(cls));
    std::snprintf(label, label_size, "%s", text.c_str());
  });
}

GT_API void gt_eval_options_default(gt_eval_options* o) {
  if (!o) return;
  const ProtocolOptions d;
  o->method = static_cast<int>(d.method);
  o->patterns = d.patterns;
  o->noise = d.noise;
  o->seeds = nullptr;
  o->n_seeds = 0;
  gt_train_options_default(&o->train);
  o->accept_threshold = d.accept_threshold;
}

GT_API gt_status gt_evaluate(const gt_model* model, const gt_corpus* corpus,
                             double accept_threshold, char** report, double* mean_rate) {
  return wrap([&] {
    require(model && corpus && report, "arguments must not be NULL");
    const auto r = evaluate(model->model, corpus->traces, accept_threshold);
    const std::string header = "# gesteach eval model method=" +
                               std::to_string(static_cast<int>(model->model.method)) +
                               " traces=" + std::to_string(corpus->traces.size()) + "\n";
    *report = dup(format_eval_report(r, header));
    if (mean_rate) *mean_rate = r.mean_rate();
  });
}

GT_API gt_status gt_eval_protocol(const gt_eval_options* options, char** report,
                                  double* mean_rate) {
  return wrap([&] {
    require(report != nullptr, "report must not be NULL");
    const auto r = run_protocol(to_protocol(options));
    *report = dup(format_protocol(r));
    if (mean_rate) *mean_rate = r.mean_rate;
  });
}

GT_API gt_status gt_eval_compare(const gt_eval_options* options, char** report,
                                 double mean_rates[3]) {
  return wrap([&] {
    require(report != nullptr, "report must not be NULL");
    const auto c = compare_methods(to_protocol(options));
    *report = dup(format_comparison(c));
    if (mean_rates) {
      for (int i = 0; i < 3; ++i) mean_rates[i] = c.methods[static_cast<std::size_t>(i)].mean_rate;
    }
  });
}

GT_API gt_status gt_eval_sweep(const gt_eval_options* options, const size_t* patterns, size_t n,
                               char** report, double* mean_rates) {
  return wrap([&] {
    require(report && patterns && n > 0, "patterns and report must be given");
    const auto base = to_protocol(options);
    const auto rows = sweep_patterns(base, std::vector<std::size_t>(patterns, patterns + n));
    *report = dup(format_sweep(base, rows));
    if (mean_rates) {
      for (std::size_t i = 0; i < n; ++i) mean_rates[i] = rows[i].mean_rate;
    }
  });
}

GT_API gt_status gt_engine_create(const char* config_json, const char* profile, gt_engine** out) {
  return wrap([&] {
    require(out != nullptr, "out must not be NULL");
    auto e = std::make_unique<gt_engine>();
    e->engine = build_engine(config_json, profile);
    *out = e.release();
  });
}

GT_API void gt_engine_free(gt_engine* engine) {
  if (!engine) return;
  if (engine->log.is_open()) engine->engine->finish_recording();
  delete engine;
}

GT_API gt_status gt_engine_record(gt_engine* engine, const char* log_path) {
  return wrap([&] {
    require(engine && log_path, "arguments must not be NULL");
    require(!engine->log.is_open(), "already recording");
    engine->log.open(log_path, std::ios::binary | std::ios::trunc);
    if (!engine->log) throw Error(ErrorCode::IoError, std::string("cannot write ") + log_path);
    engine->engine->start_recording(engine->log);
  });
}

GT_API gt_status gt_engine_finish_record(gt_engine* engine) {
  return wrap([&] {
    require(engine != nullptr, "engine must not be NULL");
    engine->engine->finish_recording();
    if (engine->log.is_open()) engine->log.close();
  });
}

GT_API gt_status gt_engine_connect(gt_engine* engine, uint32_t* conn) {
  return wrap([&] {
    require(engine && conn, "arguments must not be NULL");
    *conn = engine->engine->connect();
  });
}

GT_API gt_status gt_engine_disconnect(gt_engine* engine, uint32_t conn) {
  return wrap([&] {
    require(engine != nullptr, "engine must not be NULL");
    engine->engine->disconnect(conn);
  });
}

GT_API gt_status gt_engine_submit(gt_engine* engine, uint32_t conn, const char* line) {
  return wrap([&] {
    require(engine && line, "arguments must not be NULL");
    engine->engine->submit(conn, line);
  });
}

GT_API gt_status gt_engine_step(gt_engine* engine, size_t ticks) {
  return wrap([&] {
    require(engine != nullptr, "engine must not be NULL");
    for (std::size_t i = 0; i < ticks; ++i) engine->engine->step();
  });
}

GT_API int64_t gt_engine_now(const gt_engine* engine) { return engine ? engine->engine->now() : 0; }

GT_API gt_status gt_engine_take_output(gt_engine* engine, char** lines) {
  return wrap([&] {
    require(engine && lines, "arguments must not be NULL");
    std::string text;
    for (const auto& o : engine->engine->take_output()) {
      text += o.line;
      text += '\n';
    }
    *lines = dup(text);
  });
}

GT_API gt_status gt_engine_transcript(const gt_engine* engine, char** text) {
  return wrap([&] {
    require(engine && text, "arguments must not be NULL");
    *text = dup(engine->engine->transcript());
  });
}

GT_API gt_status gt_engine_program(const gt_engine* engine, char** text) {
  return wrap([&] {
    require(engine && text, "arguments must not be NULL");
    const auto& p = engine->engine->session().program();
    if (!p) throw Error(ErrorCode::EmptyProgram, "no program generated");
    *text = dup(program_text(*p));
  });
}

GT_API gt_status gt_replay(const char* log_path, double pace, char** transcript, char** program) {
  return wrap([&] {
    require(log_path && transcript, "arguments must not be NULL");
    const auto r = replay_log(read_text_file(log_path), pace);
    char* t = dup(r.transcript);
    if (program) {
      try {
        *program = r.program_text ? dup(*r.program_text) : nullptr;
      } catch (...) {
        std::free(t);
        throw;
      }
    }
    *transcript = t;
  });
}

GT_API gt_status gt_program_run(const char* text, const char* config_json, const char* profile,
                                double final_pose[6]) {
  return wrap([&] {
    require(text && final_pose, "arguments must not be NULL");
    SessionConfig cfg = parse_config(config_json);
    if (profile && *profile) cfg.profile = profile;
    const auto prof = resolve_profile(cfg.profile);
    RobotSim sim(prof.workspace, prof.home, cfg.contact);
    const auto r = replay_program(sim, parse_program_text(text), cfg.force_thresholds(), cfg.tick_ms);
    const Pose& p = r.final_pose;
    const double v[6] = {p.x, p.y, p.z, p.rx, p.ry, p.rz};
    std::memcpy(final_pose, v, sizeof v);
  });
}

GT_API gt_status gt_server_start(const char* config_json, const char* profile,
                                 const char* endpoint, const char* log_path, gt_server** out) {
  return wrap([&] {
    require(endpoint && out, "arguments must not be NULL");
    ServerOptions so;
    so.endpoint = endpoint;
    if (log_path && *log_path) so.record_path = log_path;
    auto s = std::make_unique<gt_server>();
    s->server = std::make_unique<GatewayServer>(build_engine(config_json, profile), so);
    s->server->start();
    *out = s.release();
  });
}

GT_API int gt_server_port(const gt_server* server) { return server ? server->server->port() : -1; }

GT_API int gt_server_wait(gt_server* server, int64_t timeout_ms) {
  if (!server) return 1;
  return server->server->wait_for(timeout_ms) ? 1 : 0;
}

GT_API gt_status gt_server_stop(gt_server* server) {
  return wrap([&] {
    require(server != nullptr, "server must not be NULL");
    server->server->stop();
  });
}

GT_API gt_status gt_server_program(gt_server* server, char** text) {
  return wrap([&] {
    require(server && text, "arguments must not be NULL");
    const auto p = server->server->program_text();
    if (!p) throw Error(ErrorCode::EmptyProgram, "no program generated");
    *text = dup(*p);
  });
}

GT_API void gt_server_free(gt_server* server) { delete server; }

}  // extern "C"
