#include "mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace gesteach {

namespace {

struct Activations {
  std::array<double, kHidden> hidden{};
  OutputVector output{};
};

Activations run(const MlpModel& m, std::span<const double, kInputs> x) {
  Activations a;
  for (std::size_t i = 0; i < kHidden; ++i) {
    double net = m.hidden_b(i);
    for (std::size_t j = 0; j < kInputs; ++j) net += m.hidden_w(i, j) * x[j];
    a.hidden[i] = sigmoid(net);
  }
  for (std::size_t i = 0; i < kOutputs; ++i) {
    double net = m.output_b(i);
    for (std::size_t j = 0; j < kHidden; ++j) net += m.output_w(i, j) * a.hidden[j];
    a.output[i] = sigmoid(net);
  }
  return a;
}

// Adds dE/dparam for one pattern into grad.
void accumulate_gradient(const MlpModel& m, const Pattern& p, std::vector<double>& grad) {
  const Activations a = run(m, p.input);
  std::array<double, kOutputs> delta_out{};
  for (std::size_t k = 0; k < kOutputs; ++k) {
    const double y = a.output[k];
    delta_out[k] = (y - p.target[k]) * y * (1.0 - y);
  }
  std::array<double, kHidden> delta_hidden{};
  for (std::size_t j = 0; j < kHidden; ++j) {
    double back = 0.0;
    for (std::size_t k = 0; k < kOutputs; ++k) back += m.output_w(k, j) * delta_out[k];
    const double h = a.hidden[j];
    delta_hidden[j] = back * h * (1.0 - h);
  }
  for (std::size_t k = 0; k < kOutputs; ++k) {
    for (std::size_t j = 0; j < kHidden; ++j) {
      grad[MlpModel::kOutputWeights + k * kHidden + j] += delta_out[k] * a.hidden[j];
    }
    grad[MlpModel::kOutputBiases + k] += delta_out[k];
  }
  for (std::size_t j = 0; j < kHidden; ++j) {
    for (std::size_t i = 0; i < kInputs; ++i) {
      grad[MlpModel::kHiddenWeights + j * kInputs + i] += delta_hidden[j] * p.input[i];
    }
    grad[MlpModel::kHiddenBiases + j] += delta_hidden[j];
  }
}

// Uniform double in [0, 1) from the top 53 bits; portable across standard
// libraries, unlike std::uniform_real_distribution.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void shuffle_indices(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

bool MlpModel::all_finite() const {
  return std::all_of(params.begin(), params.end(), [](double v) { return std::isfinite(v); });
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

InputVector encode_input(const GestureWindow& window) {
  if (window.samples.size() != kShortWindowLength) {
    throw Error(ErrorCode::WrongWindowLength, "network input needs exactly 4 samples, got " +
                                                  std::to_string(window.samples.size()));
  }
  InputVector v{};
  for (std::size_t i = 0; i < kShortWindowLength; ++i) {
    const auto& s = window.samples[i];
    v[3 * i + 0] = s.ax / kAccelLimitG;
    v[3 * i + 1] = s.ay / kAccelLimitG;
    v[3 * i + 2] = s.az / kAccelLimitG;
  }
  return v;
}

OutputVector one_hot(GestureClass cls) {
  if (cls == GestureClass::Unrecognized) {
    throw Error(ErrorCode::UnknownClass, "Unrecognized has no target neuron");
  }
  OutputVector t{};
  t[class_index(cls)] = 1.0;
  return t;
}

MlpModel init_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MlpModel m;
  for (auto& p : m.params) p = unit_uniform(rng) - 0.5;
  return m;
}

OutputVector forward(const MlpModel& model, std::span<const double, kInputs> input) {
  return run(model, input).output;
}

double batch_error(const MlpModel& model, std::span<const Pattern> batch) {
  double e = 0.0;
  for (const auto& p : batch) {
    const auto y = forward(model, p.input);
    for (std::size_t k = 0; k < kOutputs; ++k) {
      const double d = y[k] - p.target[k];
      e += 0.5 * d * d;
    }
  }
  return e;
}

double batch_mse(const MlpModel& model, std::span<const Pattern> batch) {
  if (batch.empty()) return 0.0;
  return 2.0 * batch_error(model, batch) / static_cast<double>(batch.size() * kOutputs);
}

std::vector<double> backprop_gradient(const MlpModel& model, std::span<const Pattern> batch) {
  std::vector<double> grad(MlpModel::kParamCount, 0.0);
  for (const auto& p : batch) accumulate_gradient(model, p, grad);
  return grad;
}

double gradient_check(const MlpModel& model, std::span<const Pattern> batch,
                      const GradientFn& analytic, const GradientCheckOptions& options) {
  if (batch.empty()) throw Error(ErrorCode::InvalidArgument, "gradient check needs a batch");
  const auto grad = analytic(model, batch);
  if (grad.size() != MlpModel::kParamCount) {
    throw Error(ErrorCode::InvalidArgument, "gradient has the wrong length");
  }

  std::vector<std::size_t> indices(MlpModel::kParamCount);
  std::iota(indices.begin(), indices.end(), 0);
  if (options.max_params > 0 && options.max_params < indices.size()) {
    std::mt19937_64 rng(options.seed);
    shuffle_indices(indices, rng);
    indices.resize(options.max_params);
  }

  MlpModel probe = model;
  double worst = 0.0;
  for (auto idx : indices) {
    const double saved = probe.params[idx];
    probe.params[idx] = saved + options.step;
    const double up = batch_error(probe, batch);
    probe.params[idx] = saved - options.step;
    const double down = batch_error(probe, batch);
    probe.params[idx] = saved;

    const double numeric = (up - down) / (2.0 * options.step);
    const double scale = std::max(std::abs(grad[idx]), std::abs(numeric));
    if (scale < 1e-9) continue;
    worst = std::max(worst, std::abs(grad[idx] - numeric) / scale);
  }
  return worst;
}

std::vector<Pattern> make_patterns(const LabeledCorpus& corpus) {
  std::vector<Pattern> out;
  out.reserve(corpus.entries.size());
  for (const auto& e : corpus.entries) out.push_back({encode_input(e.window), one_hot(e.label)});
  return out;
}

TrainResult train_ann(const LabeledCorpus& corpus, const TrainConfig& config) {
  if (!(config.learning_rate > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "learning_rate must be > 0");
  }
  if (config.max_cycles < 1) throw Error(ErrorCode::InvalidArgument, "max_cycles must be >= 1");
  const auto missing = corpus.missing_classes();
  if (!missing.empty()) {
    std::string list;
    for (auto c : missing) {
      if (!list.empty()) list += ", ";
      list += class_label(c);
    }
    throw Error(ErrorCode::EmptyClass, "no training windows for: " + list);
  }
  const auto patterns = make_patterns(corpus);

  std::mt19937_64 rng(config.seed);
  TrainResult result;
  result.model = init_model(rng());
  MlpModel& m = result.model;

  const double initial_mse = batch_mse(m, patterns);
  std::vector<double> velocity(MlpModel::kParamCount, 0.0);
  std::vector<double> grad(MlpModel::kParamCount, 0.0);
  std::vector<std::size_t> order(patterns.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t cycle = 1; cycle <= config.max_cycles; ++cycle) {
    shuffle_indices(order, rng);
    for (auto idx : order) {
      std::fill(grad.begin(), grad.end(), 0.0);
      accumulate_gradient(m, patterns[idx], grad);
      for (std::size_t i = 0; i < MlpModel::kParamCount; ++i) {
        velocity[i] = -config.learning_rate * grad[i] + config.momentum * velocity[i];
        m.params[i] += velocity[i];
      }
    }
    result.cycles = cycle;

    // Without early stopping the divergence guard only needs a periodic look.
    const bool early_stop = config.target_mse > 0.0;
    if (!early_stop && cycle % 100 != 0 && cycle != config.max_cycles) continue;
    const double mse = batch_mse(m, patterns);
    if (!std::isfinite(mse) || !m.all_finite() || mse > 10.0 * initial_mse) {
      throw Error(ErrorCode::DivergenceDetected,
                  "training diverged at cycle " + std::to_string(cycle));
    }
    result.final_mse = mse;
    if (early_stop && mse <= config.target_mse) break;
  }
  return result;
}

Recognition recognize_outputs(const MlpModel& model, const OutputVector& outputs,
                              double accept_threshold) {
  Recognition r;
  r.raw_outputs = outputs;
  std::size_t best = 0;
  for (std::size_t k = 1; k < kOutputs; ++k) {
    if (outputs[k] > outputs[best]) best = k;  // ties keep the lower index
  }
  r.winner = model.class_order[best];
  r.confidence = outputs[best];
  if (r.confidence >= kDetectThreshold && r.confidence >= accept_threshold) r.cls = r.winner;
  return r;
}

Recognition classify_ann(const MlpModel& model, const GestureWindow& window,
                         double accept_threshold) {
  const auto x = encode_input(window);
  return recognize_outputs(model, forward(model, x), accept_threshold);
}

namespace {
using nlohmann::json;
}

std::string mlp_model_to_json(const MlpModel& model) {
  json order = json::array();
  for (auto c : model.class_order) order.push_back(std::string(class_label(c)));
  auto matrix = [&](std::size_t offset, std::size_t rows, std::size_t cols) {
    json mtx = json::array();
    for (std::size_t r = 0; r < rows; ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < cols; ++c) row.push_back(model.params[offset + r * cols + c]);
      mtx.push_back(std::move(row));
    }
    return mtx;
  };
  auto vec = [&](std::size_t offset, std::size_t n) {
    json v = json::array();
    for (std::size_t i = 0; i < n; ++i) v.push_back(model.params[offset + i]);
    return v;
  };
  json doc = {
      {"format", "gesteach-mlp"},
      {"version", 1},
      {"activation", "sigmoid"},
      {"layer_sizes", {kInputs, kHidden, kOutputs}},
      {"class_order", order},
      {"layers",
       json::array({{{"weights", matrix(MlpModel::kHiddenWeights, kHidden, kInputs)},
                     {"biases", vec(MlpModel::kHiddenBiases, kHidden)}},
                    {{"weights", matrix(MlpModel::kOutputWeights, kOutputs, kHidden)},
                     {"biases", vec(MlpModel::kOutputBiases, kOutputs)}}})},
  };
  return doc.dump(1) + "\n";
}

MlpModel mlp_model_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format") != "gesteach-mlp") throw Error(ErrorCode::ParseError, "not a network model file");
    if (doc.at("layer_sizes") != json({kInputs, kHidden, kOutputs})) {
      throw Error(ErrorCode::ParseError, "layer sizes must be 12-20-12");
    }
    MlpModel m;
    const auto& order = doc.at("class_order");
    if (order.size() != kOutputs) throw Error(ErrorCode::ParseError, "class_order needs 12 labels");
    for (std::size_t i = 0; i < kOutputs; ++i) {
      auto c = parse_class(order[i].get<std::string>());
      if (!c) throw Error(ErrorCode::ParseError, "unknown class in class_order");
      m.class_order[i] = *c;
    }
    const auto& layers = doc.at("layers");
    if (layers.size() != 2) throw Error(ErrorCode::ParseError, "expected 2 weight layers");
    auto read = [&](const json& layer, std::size_t w_off, std::size_t rows, std::size_t cols,
                    std::size_t b_off) {
      const auto& w = layer.at("weights");
      const auto& b = layer.at("biases");
      if (w.size() != rows || b.size() != rows) throw Error(ErrorCode::ParseError, "bad layer shape");
      for (std::size_t r = 0; r < rows; ++r) {
        if (w[r].size() != cols) throw Error(ErrorCode::ParseError, "bad weight row length");
        for (std::size_t c = 0; c < cols; ++c) m.params[w_off + r * cols + c] = w[r][c].get<double>();
        m.params[b_off + r] = b[r].get<double>();
      }
    };
    read(layers[0], MlpModel::kHiddenWeights, kHidden, kInputs, MlpModel::kHiddenBiases);
    read(layers[1], MlpModel::kOutputWeights, kOutputs, kHidden, MlpModel::kOutputBiases);
    if (!m.all_finite()) throw Error(ErrorCode::ParseError, "non-finite weight in model file");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("network model: ") + e.what());
  }
}

}  // namespace gesteach
