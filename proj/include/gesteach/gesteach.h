/* gesteach: gesture and posture driven robot teaching against a simulated
 * controller. Plain C interface over opaque handles.
 *
 * Every call returns a gt_status. On failure gt_last_error() holds a message
 * for the calling thread until its next failing call. Strings handed out by
 * the library are freed with gt_string_free.
 */
#ifndef GESTEACH_H
#define GESTEACH_H

#include <stddef.h>
#include <stdint.h>

#if defined(GESTEACH_BUILDING)
#define GT_API __attribute__((visibility("default")))
#else
#define GT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gt_status {
  GT_OK = 0,
  GT_E_INVALID_ARGUMENT = 1,
  GT_E_PARSE = 2,
  GT_E_CLOCK = 3,
  GT_E_NO_ZERO_CROSSING = 4,
  GT_E_INSUFFICIENT_SAMPLES = 5,
  GT_E_UNKNOWN_CLASS = 6,
  GT_E_EMPTY_CLASS = 7,
  GT_E_WRONG_WINDOW_LENGTH = 8,
  GT_E_DIVERGENCE = 9,
  GT_E_NOT_A_TRANSLATION = 10,
  GT_E_NOT_A_ROTATION = 11,
  GT_E_DEGENERATE = 12,
  GT_E_MOTORS_OFF = 13,
  GT_E_NOT_STOPPED = 14,
  GT_E_UNKNOWN_VERB = 15,
  GT_E_EMPTY_PROGRAM = 16,
  GT_E_GUARD_STOPPED = 17,
  GT_E_BIND = 18,
  GT_E_IO = 19,
  GT_E_INTERNAL = 99
} gt_status;

GT_API const char* gt_version(void);
GT_API const char* gt_status_name(gt_status status);
GT_API const char* gt_last_error(void);
GT_API void gt_string_free(char* s);

/* ---- corpora ---------------------------------------------------------- */

typedef struct gt_corpus gt_corpus;

/* per_class synthetic traces for each of the 12 classes. */
GT_API gt_status gt_corpus_generate(double noise_sigma, size_t per_class, uint64_t seed,
                                    gt_corpus** out);
/* Reads a manifest (trace,press_index,label) and the traces it lists. */
GT_API gt_status gt_corpus_load(const char* manifest_path, gt_corpus** out);
/* Writes traces/NNNN.csv and manifest.csv under dir (created if missing). */
GT_API gt_status gt_corpus_save(const gt_corpus* corpus, const char* dir);
GT_API size_t gt_corpus_size(const gt_corpus* corpus);
GT_API void gt_corpus_free(gt_corpus* corpus);

/* ---- recognizers ------------------------------------------------------ */

typedef struct gt_model gt_model;

typedef struct gt_train_options {
  size_t cycles;
  double target_mse;
  double learning_rate;
  double momentum;
  uint64_t seed;
} gt_train_options;

typedef struct gt_train_report {
  size_t windows;
  size_t cycles;    /* Method 3 only */
  double final_mse; /* Method 3 only */
} gt_train_report;

/* 10000 cycles, target MSE 1e-3, rate 0.25, momentum 0.1, seed 1. */
GT_API void gt_train_options_default(gt_train_options* options);

/* method: 1 zero-crossing bands, 2 first-four bands, 3 neural network. */
GT_API gt_status gt_model_train(const gt_corpus* corpus, int method,
                                const gt_train_options* options, gt_model** out,
                                gt_train_report* report);
GT_API gt_status gt_model_load(const char* path, gt_model** out);
GT_API gt_status gt_model_save(const gt_model* model, const char* path);
GT_API int gt_model_method(const gt_model* model);
GT_API void gt_model_free(gt_model* model);

/* Classifies the first window of a trace given as t_ms/ax/ay/az/b arrays.
 * label receives the class label (or "Unrecognized"); size >= 16. */
GT_API gt_status gt_model_classify(const gt_model* model, const int64_t* t_ms, const double* ax,
                                   const double* ay, const double* az, const int* b, size_t n,
                                   size_t press_index, char* label, size_t label_size);

/* ---- evaluation ------------------------------------------------------- */

typedef struct gt_eval_options {
  int method;
  size_t patterns;
  double noise;
  const uint64_t* seeds; /* NULL: seeds 1..5 */
  size_t n_seeds;
  gt_train_options train;
  double accept_threshold;
} gt_eval_options;

GT_API void gt_eval_options_default(gt_eval_options* options);

/* Per-class table of a model on a corpus. */
GT_API gt_status gt_evaluate(const gt_model* model, const gt_corpus* corpus,
                             double accept_threshold, char** report, double* mean_rate);
/* Seeded 50/50 train/held-out protocol averaged over seeds. */
GT_API gt_status gt_eval_protocol(const gt_eval_options* options, char** report,
                                  double* mean_rate);
/* Methods 1, 2 and 3 on the same corpora. mean_rates may be NULL. */
GT_API gt_status gt_eval_compare(const gt_eval_options* options, char** report,
                                 double mean_rates[3]);
/* Protocol repeated for each pattern count. mean_rates (n entries) may be NULL. */
GT_API gt_status gt_eval_sweep(const gt_eval_options* options, const size_t* patterns, size_t n,
                               char** report, double* mean_rates);

/* ---- sessions --------------------------------------------------------- */

/* config_json: session configuration document (NULL or "" for defaults).
 * profile: "hp6", "irb140" or a profile JSON path; NULL uses the config's.
 * Models named in the config ("stat_model", "ann_model") are loaded. */
typedef struct gt_engine gt_engine;

GT_API gt_status gt_engine_create(const char* config_json, const char* profile, gt_engine** out);
GT_API void gt_engine_free(gt_engine* engine);
GT_API gt_status gt_engine_record(gt_engine* engine, const char* log_path);
GT_API gt_status gt_engine_finish_record(gt_engine* engine);
GT_API gt_status gt_engine_connect(gt_engine* engine, uint32_t* conn);
GT_API gt_status gt_engine_disconnect(gt_engine* engine, uint32_t conn);
GT_API gt_status gt_engine_submit(gt_engine* engine, uint32_t conn, const char* line);
GT_API gt_status gt_engine_step(gt_engine* engine, size_t ticks);
GT_API int64_t gt_engine_now(const gt_engine* engine);
/* Outbound lines since the last call, newline-terminated. */
GT_API gt_status gt_engine_take_output(gt_engine* engine, char** lines);
GT_API gt_status gt_engine_transcript(const gt_engine* engine, char** text);
/* GT_E_EMPTY_PROGRAM when nothing was generated yet. */
GT_API gt_status gt_engine_program(const gt_engine* engine, char** text);

/* Replays a session log. pace 0 runs flat out, k runs k times real time.
 * program may be NULL; *program is NULL when the session made none. */
GT_API gt_status gt_replay(const char* log_path, double pace, char** transcript, char** program);

/* Runs program text on a fresh simulator and reports the final pose
 * (x, y, z, rx, ry, rz). */
GT_API gt_status gt_program_run(const char* program_text, const char* config_json,
                                const char* profile, double final_pose[6]);

/* ---- gateway server --------------------------------------------------- */

typedef struct gt_server gt_server;

/* endpoint "host:port" (port 0 picks one); log_path may be NULL. */
GT_API gt_status gt_server_start(const char* config_json, const char* profile,
                                 const char* endpoint, const char* log_path, gt_server** out);
GT_API int gt_server_port(const gt_server* server);
/* 1 once the server has stopped, 0 when timeout_ms elapsed first. */
GT_API int gt_server_wait(gt_server* server, int64_t timeout_ms);
GT_API gt_status gt_server_stop(gt_server* server);
GT_API gt_status gt_server_program(gt_server* server, char** text);
GT_API void gt_server_free(gt_server* server);

#ifdef __cplusplus
}
#endif

#endif /* GESTEACH_H */
