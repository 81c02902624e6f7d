#include "stat_recognizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <tuple>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace gesteach {

bool ClassBand::contains(Vec3 a) const {
  for (int axis = 0; axis < 3; ++axis) {
    if (a[axis] < mean[axis] - sigma[axis] || a[axis] > mean[axis] + sigma[axis]) return false;
  }
  return true;
}

double ClassBand::normalized_distance(Vec3 a) const {
  double d = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    const double z = (a[axis] - mean[axis]) / sigma[axis];
    d += z * z;
  }
  return d;
}

StatModel train_stat(const LabeledCorpus& corpus, Method method, double sigma_floor) {
  if (corpus.entries.empty()) {
    throw Error(ErrorCode::EmptyClass, "corpus has no labeled windows");
  }
  if (!(sigma_floor > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma_floor must be > 0");

  std::array<std::vector<Vec3>, kNumClasses> means;
  for (const auto& e : corpus.entries) {
    if (e.label == GestureClass::Unrecognized) {
      throw Error(ErrorCode::UnknownClass, "Unrecognized is not a training label");
    }
    if (e.window.samples.empty()) throw Error(ErrorCode::WrongWindowLength, "empty window");
    means[class_index(e.label)].push_back(mean_accel(e.window));
  }

  StatModel model;
  model.method = method;
  for (auto cls : kAllClasses) {
    auto& m = means[class_index(cls)];
    if (m.empty()) continue;
    // Sorted so the floating-point sums do not depend on corpus order.
    std::sort(m.begin(), m.end(), [](Vec3 a, Vec3 b) {
      return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
    });
    const double n = static_cast<double>(m.size());
    Vec3 mean;
    for (auto v : m) mean = mean + v;
    mean = mean / n;
    Vec3 var;
    for (auto v : m) {
      const Vec3 d = v - mean;
      var = var + Vec3{d.x * d.x, d.y * d.y, d.z * d.z};
    }
    var = var / n;
    ClassBand band;
    band.cls = cls;
    band.mean = mean;
    band.sigma = {std::max(sigma_floor, std::sqrt(var.x)), std::max(sigma_floor, std::sqrt(var.y)),
                  std::max(sigma_floor, std::sqrt(var.z))};
    band.n_patterns = m.size();
    model.bands.push_back(band);
  }
  return model;
}

StatModel train_stat_all(const LabeledCorpus& corpus, Method method, double sigma_floor) {
  const auto missing = corpus.missing_classes();
  if (!missing.empty()) {
    std::string list;
    for (auto c : missing) {
      if (!list.empty()) list += ", ";
      list += class_label(c);
    }
    throw Error(ErrorCode::EmptyClass, "no training windows for: " + list);
  }
  return train_stat(corpus, method, sigma_floor);
}

StatResult classify_stat(const StatModel& model, const GestureWindow& window) {
  if (window.samples.empty()) return {};
  const Vec3 a = mean_accel(window);
  StatResult best;
  double best_distance = std::numeric_limits<double>::infinity();
  for (const auto& band : model.bands) {
    if (!band.contains(a)) continue;
    const double d = band.normalized_distance(a);
    // Equal distances resolve to the lower class index whatever the band order.
    if (d < best_distance ||
        (d == best_distance && class_index(band.cls) < class_index(best.cls))) {
      best_distance = d;
      best.cls = band.cls;
    }
  }
  if (best.cls != GestureClass::Unrecognized) {
    best.score = std::clamp(1.0 - best_distance / 3.0, 0.0, 1.0);
  }
  return best;
}

namespace {

using nlohmann::json;

json vec_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::ParseError, "expected a triple");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string stat_model_to_json(const StatModel& model) {
  json bands = json::array();
  for (const auto& b : model.bands) {
    bands.push_back({{"label", std::string(class_label(b.cls))},
                     {"mean", vec_json(b.mean)},
                     {"sigma", vec_json(b.sigma)},
                     {"n_patterns", b.n_patterns}});
  }
  json doc = {{"format", "gesteach-stat"},
              {"version", 1},
              {"method", static_cast<int>(model.method)},
              {"bands", bands}};
  return doc.dump(2) + "\n";
}

StatModel stat_model_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format") != "gesteach-stat") {
      throw Error(ErrorCode::ParseError, "not a statistical model file");
    }
    StatModel model;
    auto method = method_from_int(doc.at("method").get<int>());
    if (!method || *method == Method::Neural) {
      throw Error(ErrorCode::ParseError, "statistical model method must be 1 or 2");
    }
    model.method = *method;
    for (const auto& jb : doc.at("bands")) {
      ClassBand b;
      auto cls = parse_class(jb.at("label").get<std::string>());
      if (!cls) throw Error(ErrorCode::ParseError, "unknown class label in model");
      b.cls = *cls;
      b.mean = vec_from(jb.at("mean"));
      b.sigma = vec_from(jb.at("sigma"));
      b.n_patterns = jb.at("n_patterns").get<std::size_t>();
      if (b.n_patterns < 1 || !(b.sigma.x > 0 && b.sigma.y > 0 && b.sigma.z > 0)) {
        throw Error(ErrorCode::ParseError, "band violates sigma > 0 / n_patterns >= 1");
      }
      model.bands.push_back(b);
    }
    std::sort(model.bands.begin(), model.bands.end(), [](const ClassBand& a, const ClassBand& b) {
      return class_index(a.cls) < class_index(b.cls);
    });
    for (std::size_t i = 1; i < model.bands.size(); ++i) {
      if (model.bands[i].cls == model.bands[i - 1].cls) {
        throw Error(ErrorCode::ParseError, "duplicate band for a class");
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("statistical model: ") + e.what());
  }
}

}  // namespace gesteach
