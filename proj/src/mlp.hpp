#pragma once

// Three-layer sigmoid network (12 inputs, 20 hidden, 12 outputs) trained by
// online backpropagation with momentum.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "signal.hpp"

namespace gesteach {

inline constexpr std::size_t kInputs = 12;
inline constexpr std::size_t kHidden = 20;
inline constexpr std::size_t kOutputs = 12;
inline constexpr double kDetectThreshold = 0.5;
inline constexpr double kDefaultAcceptThreshold = 0.8;

using InputVector = std::array<double, kInputs>;
using OutputVector = std::array<double, kOutputs>;

/// Parameters live in one flat vector:
///   [hidden weights 20x12 | hidden biases 20 | output weights 12x20 | output biases 12]
/// Weight matrices are row-major with one row per receiving neuron, so
/// w(i, j) connects input j to neuron i.
struct MlpModel {
  static constexpr std::size_t kHiddenWeights = 0;
  static constexpr std::size_t kHiddenBiases = kHiddenWeights + kHidden * kInputs;
  static constexpr std::size_t kOutputWeights = kHiddenBiases + kHidden;
  static constexpr std::size_t kOutputBiases = kOutputWeights + kOutputs * kHidden;
  static constexpr std::size_t kParamCount = kOutputBiases + kOutputs;

  std::vector<double> params = std::vector<double>(kParamCount, 0.0);
  std::array<GestureClass, kOutputs> class_order = kAllClasses;

  double& hidden_w(std::size_t i, std::size_t j) { return params[kHiddenWeights + i * kInputs + j]; }
  double hidden_w(std::size_t i, std::size_t j) const { return params[kHiddenWeights + i * kInputs + j]; }
  double& hidden_b(std::size_t i) { return params[kHiddenBiases + i]; }
  double hidden_b(std::size_t i) const { return params[kHiddenBiases + i]; }
  double& output_w(std::size_t i, std::size_t j) { return params[kOutputWeights + i * kHidden + j]; }
  double output_w(std::size_t i, std::size_t j) const { return params[kOutputWeights + i * kHidden + j]; }
  double& output_b(std::size_t i) { return params[kOutputBiases + i]; }
  double output_b(std::size_t i) const { return params[kOutputBiases + i]; }

  bool all_finite() const;
};

struct TrainConfig {
  double learning_rate = 0.25;
  double momentum = 0.1;
  std::size_t max_cycles = 100000;
  double target_mse = 0.0;  // 0 disables early stopping
  std::uint64_t seed = 1;
};

struct TrainResult {
  MlpModel model;
  std::size_t cycles = 0;
  double final_mse = 0.0;  // full-corpus MSE of the returned model
};

struct Recognition {
  GestureClass cls = GestureClass::Unrecognized;
  GestureClass winner = GestureClass::Unrecognized;  // argmax before thresholds
  double confidence = 0.0;
  OutputVector raw_outputs{};
};

struct Pattern {
  InputVector input{};
  OutputVector target{};
};

double sigmoid(double x);

/// [ax1, ay1, az1, ..., ax4, ay4, az4] / 3. Throws WrongWindowLength.
InputVector encode_input(const GestureWindow& window);

/// One-hot target for a class in the model's output order.
OutputVector one_hot(GestureClass cls);

MlpModel init_model(std::uint64_t seed);

OutputVector forward(const MlpModel& model, std::span<const double, kInputs> input);

/// Sum over the batch of 0.5 * sum_k (y_k - t_k)^2.
double batch_error(const MlpModel& model, std::span<const Pattern> batch);
/// Mean over patterns and outputs of (y_k - t_k)^2.
double batch_mse(const MlpModel& model, std::span<const Pattern> batch);

/// Analytic dE/dparam of batch_error, laid out like MlpModel::params.
std::vector<double> backprop_gradient(const MlpModel& model, std::span<const Pattern> batch);

using GradientFn = std::function<std::vector<double>(const MlpModel&, std::span<const Pattern>)>;

struct GradientCheckOptions {
  double step = 1e-4;
  std::size_t max_params = 0;  // 0 checks every parameter
  std::uint64_t seed = 1;      // picks the subset when max_params > 0
};

/// Max over checked parameters of |analytic - numeric| / max(|analytic|, |numeric|)
/// against central finite differences of batch_error. Parameters where both
/// gradients are below 1e-9 in magnitude are skipped.
double gradient_check(const MlpModel& model, std::span<const Pattern> batch,
                      const GradientFn& analytic = backprop_gradient,
                      const GradientCheckOptions& options = {});

std::vector<Pattern> make_patterns(const LabeledCorpus& corpus);

/// Requires 4-sample windows and all 12 classes. Throws EmptyClass,
/// WrongWindowLength, DivergenceDetected.
TrainResult train_ann(const LabeledCorpus& corpus, const TrainConfig& config);

Recognition classify_ann(const MlpModel& model, const GestureWindow& window,
                         double accept_threshold = kDefaultAcceptThreshold);
Recognition recognize_outputs(const MlpModel& model, const OutputVector& outputs,
                              double accept_threshold = kDefaultAcceptThreshold);

std::string mlp_model_to_json(const MlpModel& model);
MlpModel mlp_model_from_json(const std::string& text);

}  // namespace gesteach
