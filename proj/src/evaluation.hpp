#pragma once

// Synthetic corpora, train/held-out splits and recognition-rate reports.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlp.hpp"
#include "signal.hpp"
#include "stat_recognizer.hpp"

namespace gesteach {

/// Either a band model (Methods 1 and 2) or a network (Method 3).
struct RecognizerModel {
  Method method = Method::Neural;
  std::optional<StatModel> stat;
  std::optional<MlpModel> ann;
};

/// Reads either model format, detected from its "format" field.
RecognizerModel recognizer_from_json(const std::string& text);
std::string recognizer_to_json(const RecognizerModel& model);

/// per_class traces for each of the 12 classes, class-major order.
std::vector<LabeledTrace> generate_corpus(double noise_sigma, std::size_t per_class,
                                          std::uint64_t seed, const GeneratorProfile& profile = {});

/// Seed for the k-th trace of a class inside a corpus.
std::uint64_t trace_seed(std::uint64_t corpus_seed, GestureClass cls, std::size_t k);

struct Split {
  std::vector<LabeledTrace> train;
  std::vector<LabeledTrace> held_out;
};

/// Per class, a seeded shuffle puts floor(n/2) traces in train and the rest
/// in held_out.
Split split_half(const std::vector<LabeledTrace>& traces, std::uint64_t seed);

/// Window rule used to cut traces for a method.
GestureWindow window_for(const LabeledTrace& t, Method method);

struct TrainOptions {
  std::size_t cycles = 10000;
  double target_mse = 1e-3;
  double learning_rate = 0.25;
  double momentum = 0.1;
  std::uint64_t seed = 1;
};

struct TrainReport {
  RecognizerModel model;
  std::size_t cycles = 0;   // Method 3 only
  double final_mse = 0.0;   // Method 3 only
  std::size_t windows = 0;
};

/// Throws EmptyClass (a class has no traces), DivergenceDetected.
TrainReport train_recognizer(const std::vector<LabeledTrace>& traces, Method method,
                             const TrainOptions& options);

/// Class decided by a model for one trace; Unrecognized when rejected.
GestureClass recognize_trace(const RecognizerModel& model, const LabeledTrace& t,
                             double accept_threshold = kDefaultAcceptThreshold);

struct ClassRate {
  std::size_t correct = 0;
  std::size_t total = 0;
  double rate() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct EvalReport {
  Method method = Method::Neural;
  std::array<ClassRate, kNumClasses> per_class{};
  double mean_window_length = 0.0;
  /// Mean of the per-class rates over classes with samples.
  double mean_rate() const;
};

EvalReport evaluate(const RecognizerModel& model, const std::vector<LabeledTrace>& traces,
                    double accept_threshold = kDefaultAcceptThreshold);

struct ProtocolOptions {
  Method method = Method::Neural;
  std::size_t patterns = 30;  // training patterns per class; held-out gets as many
  double noise = 0.05;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  TrainOptions train;
  double accept_threshold = kDefaultAcceptThreshold;
  GeneratorProfile generator;

  nlohmann::json to_json() const;
};

struct ProtocolResult {
  ProtocolOptions options;
  std::vector<EvalReport> per_seed;
  std::vector<TrainReport> training;  // models dropped, stats kept
  std::array<double, kNumClasses> class_rate{};  // averaged over seeds
  double mean_rate = 0.0;
};

/// For each seed: generate 2*patterns traces per class, split them 50/50,
/// train on one half and score the other; rates averaged over seeds.
ProtocolResult run_protocol(const ProtocolOptions& options);

struct Comparison {
  ProtocolOptions options;
  std::array<ProtocolResult, 3> methods;  // Methods 1, 2, 3 on the same corpora
};

Comparison compare_methods(const ProtocolOptions& options);

struct SweepRow {
  std::size_t patterns = 0;
  double mean_rate = 0.0;
  double min_seed_rate = 0.0;
  double max_seed_rate = 0.0;
};

std::vector<SweepRow> sweep_patterns(const ProtocolOptions& base,
                                     const std::vector<std::size_t>& patterns);

/// Tab-separated tables, stable class order, a '#' header with seed and
/// config hash.
std::string format_eval_report(const EvalReport& report, const std::string& header);
std::string format_protocol(const ProtocolResult& result);
std::string format_comparison(const Comparison& cmp);
std::string format_sweep(const ProtocolOptions& base, const std::vector<SweepRow>& rows);

}  // namespace gesteach
