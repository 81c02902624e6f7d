#include "evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "config.hpp"
#include "error.hpp"

namespace gesteach {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string pct(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * r);
  return buf;
}

std::string num(double v, const char* fmt = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string seeds_text(const std::vector<std::uint64_t>& seeds) {
  std::string s;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(seeds[i]);
  }
  return s;
}

}  // namespace

RecognizerModel recognizer_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model file: ") + e.what());
  }
  const auto format = doc.value("format", std::string());
  RecognizerModel m;
  if (format == "gesteach-stat") {
    m.stat = stat_model_from_json(text);
    m.method = m.stat->method;
  } else if (format == "gesteach-mlp") {
    m.ann = mlp_model_from_json(text);
    m.method = Method::Neural;
  } else {
    throw Error(ErrorCode::ParseError, "unknown model format '" + format + "'");
  }
  return m;
}

std::string recognizer_to_json(const RecognizerModel& model) {
  if (model.ann) return mlp_model_to_json(*model.ann);
  if (model.stat) return stat_model_to_json(*model.stat);
  throw Error(ErrorCode::InvalidArgument, "empty recognizer model");
}

std::uint64_t trace_seed(std::uint64_t corpus_seed, GestureClass cls, std::size_t k) {
  return splitmix64(splitmix64(corpus_seed) ^ (class_index(cls) * 1000003ULL + k));
}

std::vector<LabeledTrace> generate_corpus(double noise_sigma, std::size_t per_class,
                                          std::uint64_t seed, const GeneratorProfile& profile) {
  std::vector<LabeledTrace> out;
  out.reserve(kNumClasses * per_class);
  for (const auto cls : kAllClasses) {
    for (std::size_t k = 0; k < per_class; ++k) {
      out.push_back({generate_synthetic(cls, noise_sigma, trace_seed(seed, cls, k), profile),
                     profile.lead_in, cls});
    }
  }
  return out;
}

Split split_half(const std::vector<LabeledTrace>& traces, std::uint64_t seed) {
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (traces[i].label == GestureClass::Unrecognized) {
      throw Error(ErrorCode::UnknownClass, "trace " + std::to_string(i) + " has no class");
    }
    by_class[class_index(traces[i].label)].push_back(i);
  }
  std::mt19937_64 rng(splitmix64(seed ^ 0x5eed5eedULL));
  Split s;
  for (auto& idx : by_class) {
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng() % i)]);
    }
    const std::size_t half = idx.size() / 2;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      (i < half ? s.train : s.held_out).push_back(traces[idx[i]]);
    }
  }
  return s;
}

GestureWindow window_for(const LabeledTrace& t, Method method) {
  return segment_for(t.trace, t.press_index,
                     method == Method::ZeroCrossing ? Method::ZeroCrossing : Method::FirstFour);
}

TrainReport train_recognizer(const std::vector<LabeledTrace>& traces, Method method,
                             const TrainOptions& options) {
  const auto corpus =
      build_corpus(traces, method == Method::ZeroCrossing ? Method::ZeroCrossing : Method::FirstFour);
  TrainReport r;
  r.windows = corpus.entries.size();
  r.model.method = method;
  if (method == Method::Neural) {
    TrainConfig tc;
    tc.learning_rate = options.learning_rate;
    tc.momentum = options.momentum;
    tc.max_cycles = options.cycles;
    tc.target_mse = options.target_mse;
    tc.seed = options.seed;
    auto res = train_ann(corpus, tc);
    r.cycles = res.cycles;
    r.final_mse = res.final_mse;
    r.model.ann = std::move(res.model);
  } else {
    r.model.stat = train_stat_all(corpus, method);
  }
  return r;
}

GestureClass recognize_trace(const RecognizerModel& model, const LabeledTrace& t,
                             double accept_threshold) {
  const auto w = window_for(t, model.method);
  if (model.method == Method::Neural) {
    if (!model.ann) throw Error(ErrorCode::InvalidArgument, "Method 3 needs a network model");
    return classify_ann(*model.ann, w, accept_threshold).cls;
  }
  if (!model.stat) throw Error(ErrorCode::InvalidArgument, "Methods 1 and 2 need a band model");
  return classify_stat(*model.stat, w).cls;
}

double EvalReport::mean_rate() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : per_class) {
    if (c.total == 0) continue;
    sum += c.rate();
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

EvalReport evaluate(const RecognizerModel& model, const std::vector<LabeledTrace>& traces,
                    double accept_threshold) {
  EvalReport r;
  r.method = model.method;
  std::size_t window_samples = 0;
  for (const auto& t : traces) {
    if (t.label == GestureClass::Unrecognized) {
      throw Error(ErrorCode::UnknownClass, "evaluation trace without a class");
    }
    auto& c = r.per_class[class_index(t.label)];
    ++c.total;
    window_samples += window_for(t, model.method).samples.size();
    if (recognize_trace(model, t, accept_threshold) == t.label) ++c.correct;
  }
  if (!traces.empty()) {
    r.mean_window_length = static_cast<double>(window_samples) / static_cast<double>(traces.size());
  }
  return r;
}

json ProtocolOptions::to_json() const {
  return {{"method", static_cast<int>(method)},
          {"patterns", patterns},
          {"noise", noise},
          {"seeds", seeds},
          {"cycles", train.cycles},
          {"target_mse", train.target_mse},
          {"learning_rate", train.learning_rate},
          {"momentum", train.momentum},
          {"accept_threshold", accept_threshold},
          {"generator",
           {{"amplitude_g", generator.amplitude_g},
            {"crossing", generator.crossing},
            {"centripetal_g", generator.centripetal_g},
            {"lead_in", generator.lead_in},
            {"tail", generator.tail},
            {"posture_hold", generator.posture_hold}}}};
}

ProtocolResult run_protocol(const ProtocolOptions& options) {
  if (options.seeds.empty()) throw Error(ErrorCode::InvalidArgument, "at least one seed is needed");
  if (options.patterns == 0) throw Error(ErrorCode::InvalidArgument, "patterns must be >= 1");
  ProtocolResult res;
  res.options = options;
  for (const auto seed : options.seeds) {
    const auto corpus = generate_corpus(options.noise, 2 * options.patterns, seed, options.generator);
    const auto split = split_half(corpus, seed);
    TrainOptions to = options.train;
    to.seed = seed;
    auto trained = train_recognizer(split.train, options.method, to);
    res.per_seed.push_back(evaluate(trained.model, split.held_out, options.accept_threshold));
    trained.model = {};
    res.training.push_back(std::move(trained));
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    double sum = 0.0;
    for (const auto& r : res.per_seed) sum += r.per_class[c].rate();
    res.class_rate[c] = sum / static_cast<double>(res.per_seed.size());
  }
  double sum = 0.0;
  for (const auto& r : res.per_seed) sum += r.mean_rate();
  res.mean_rate = sum / static_cast<double>(res.per_seed.size());
  return res;
}

Comparison compare_methods(const ProtocolOptions& options) {
  Comparison cmp;
  cmp.options = options;
  const Method methods[] = {Method::ZeroCrossing, Method::FirstFour, Method::Neural};
  for (std::size_t i = 0; i < 3; ++i) {
    ProtocolOptions o = options;
    o.method = methods[i];
    cmp.methods[i] = run_protocol(o);
  }
  return cmp;
}

std::vector<SweepRow> sweep_patterns(const ProtocolOptions& base,
                                     const std::vector<std::size_t>& patterns) {
  std::vector<SweepRow> rows;
  for (const auto n : patterns) {
    ProtocolOptions o = base;
    o.patterns = n;
    const auto r = run_protocol(o);
    SweepRow row{n, r.mean_rate, 1.0, 0.0};
    for (const auto& s : r.per_seed) {
      row.min_seed_rate = std::min(row.min_seed_rate, s.mean_rate());
      row.max_seed_rate = std::max(row.max_seed_rate, s.mean_rate());
    }
    rows.push_back(row);
  }
  return rows;
}

std::string format_eval_report(const EvalReport& report, const std::string& header) {
  std::string out = header;
  out += "class\trate_pct\tcorrect\ttotal\n";
  for (const auto cls : kAllClasses) {
    const auto& c = report.per_class[class_index(cls)];
    out += std::string(class_label(cls)) + "\t" + pct(c.rate()) + "\t" + std::to_string(c.correct) +
           "\t" + std::to_string(c.total) + "\n";
  }
  out += "mean\t" + pct(report.mean_rate()) + "\t\t\n";
  return out;
}

std::string format_protocol(const ProtocolResult& r) {
  const auto& o = r.options;
  std::string out = "# gesteach eval method=" + std::to_string(static_cast<int>(o.method)) +
                    " patterns=" + std::to_string(o.patterns) + " noise=" + num(o.noise) +
                    " seeds=" + seeds_text(o.seeds) + " config=" + config_hash(o.to_json()) + "\n";
  for (std::size_t i = 0; i < r.per_seed.size(); ++i) {
    out += "# seed " + std::to_string(o.seeds[i]) + ": rate=" + pct(r.per_seed[i].mean_rate());
    if (o.method == Method::Neural) {
      out += " cycles=" + std::to_string(r.training[i].cycles) +
             " mse=" + num(r.training[i].final_mse, "%.6e");
    }
    out += "\n";
  }
  out += "class\trate_pct\n";
  for (const auto cls : kAllClasses) {
    out += std::string(class_label(cls)) + "\t" + pct(r.class_rate[class_index(cls)]) + "\n";
  }
  out += "mean\t" + pct(r.mean_rate) + "\n";
  return out;
}

std::string format_comparison(const Comparison& cmp) {
  const auto& o = cmp.options;
  ProtocolOptions hashed = o;
  hashed.method = Method::ZeroCrossing;
  std::string out = "# gesteach compare patterns=" + std::to_string(o.patterns) +
                    " noise=" + num(o.noise) + " seeds=" + seeds_text(o.seeds) +
                    " config=" + config_hash(hashed.to_json()) + "\n";
  out += "# window_samples\t" + num(cmp.methods[0].per_seed.front().mean_window_length, "%.2f") +
         "\t" + num(cmp.methods[1].per_seed.front().mean_window_length, "%.2f") + "\t" +
         num(cmp.methods[2].per_seed.front().mean_window_length, "%.2f") + "\n";
  out += "class\tmethod1_pct\tmethod2_pct\tmethod3_pct\n";
  for (const auto cls : kAllClasses) {
    const auto c = class_index(cls);
    out += std::string(class_label(cls)) + "\t" + pct(cmp.methods[0].class_rate[c]) + "\t" +
           pct(cmp.methods[1].class_rate[c]) + "\t" + pct(cmp.methods[2].class_rate[c]) + "\n";
  }
  out += "mean\t" + pct(cmp.methods[0].mean_rate) + "\t" + pct(cmp.methods[1].mean_rate) + "\t" +
         pct(cmp.methods[2].mean_rate) + "\n";
  return out;
}

std::string format_sweep(const ProtocolOptions& base, const std::vector<SweepRow>& rows) {
  std::string out = "# gesteach sweep method=" + std::to_string(static_cast<int>(base.method)) +
                    " noise=" + num(base.noise) + " seeds=" + seeds_text(base.seeds) +
                    " config=" + config_hash(base.to_json()) + "\n";
  out += "patterns\tmean_rate_pct\tmin_seed_pct\tmax_seed_pct\n";
  for (const auto& r : rows) {
    out += std::to_string(r.patterns) + "\t" + pct(r.mean_rate) + "\t" + pct(r.min_seed_rate) + "\t" +
           pct(r.max_seed_rate) + "\n";
  }
  return out;
}

}  // namespace gesteach
