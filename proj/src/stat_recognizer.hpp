#pragma once

// Per-class acceleration bands (mean +- sigma per axis) and band-membership
// classification for the zero-crossing and first-four window rules.

#include <string>
#include <vector>

#include "signal.hpp"

namespace gesteach {

inline constexpr double kSigmaFloor = 0.05;

struct ClassBand {
  GestureClass cls = GestureClass::Unrecognized;
  Vec3 mean;
  Vec3 sigma;
  std::size_t n_patterns = 0;

  bool contains(Vec3 a) const;
  /// Sum over axes of ((a - mean) / sigma)^2.
  double normalized_distance(Vec3 a) const;
};

struct StatModel {
  Method method = Method::FirstFour;
  std::vector<ClassBand> bands;  // sorted by class
};

struct StatResult {
  GestureClass cls = GestureClass::Unrecognized;
  double score = 0.0;
};

/// Band mean = mean of per-window means; sigma = population standard
/// deviation of per-window means, floored at sigma_floor. Classes absent from
/// the corpus get no band. Throws EmptyClass if the corpus is empty.
StatModel train_stat(const LabeledCorpus& corpus, Method method,
                     double sigma_floor = kSigmaFloor);

/// As train_stat, but all 12 classes must be present (EmptyClass lists the
/// missing ones).
StatModel train_stat_all(const LabeledCorpus& corpus, Method method,
                         double sigma_floor = kSigmaFloor);

StatResult classify_stat(const StatModel& model, const GestureWindow& window);

std::string stat_model_to_json(const StatModel& model);
StatModel stat_model_from_json(const std::string& text);

}  // namespace gesteach
