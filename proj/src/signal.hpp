#pragma once

// Acceleration streams, gesture classes, window segmentation and the
// synthetic gesture generator.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vec3.hpp"

namespace gesteach {

inline constexpr double kAccelLimitG = 3.0;
inline constexpr double kDefaultRateHz = 100.0;
inline constexpr std::size_t kShortWindowLength = 4;
inline constexpr double kZeroCrossingEpsilon = 0.02;

struct AccelSample {
  std::int64_t t_ms = 0;
  double ax = 0.0;
  double ay = 0.0;
  double az = 0.0;
  bool b_pressed = false;

  Vec3 accel() const { return {ax, ay, az}; }
  friend bool operator==(const AccelSample&, const AccelSample&) = default;
};

/// Clamps each axis to the sensor range of +-3 g.
AccelSample clamp_sample(AccelSample s);

struct AccelTrace {
  std::vector<AccelSample> samples;
  double rate_hz = kDefaultRateHz;

  friend bool operator==(const AccelTrace&, const AccelTrace&) = default;
};

/// Throws ClockError when timestamps are not strictly increasing or a gap
/// falls outside 1000/rate_hz ms +-50%.
void validate_clock(const AccelTrace& trace);

struct GestureWindow {
  std::vector<AccelSample> samples;
  std::size_t origin = 0;  // index of the first sample in the parent trace
};

enum class GestureClass : int {
  XPos = 0, XNeg, YPos, YNeg, ZPos, ZNeg,
  RXPos, RXNeg, RYPos, RYNeg, RZPos, RZNeg,
  Unrecognized,
};

inline constexpr std::size_t kNumClasses = 12;

/// The trainable classes in output-neuron order.
inline constexpr std::array<GestureClass, kNumClasses> kAllClasses = {
    GestureClass::XPos,  GestureClass::XNeg,  GestureClass::YPos,  GestureClass::YNeg,
    GestureClass::ZPos,  GestureClass::ZNeg,  GestureClass::RXPos, GestureClass::RXNeg,
    GestureClass::RYPos, GestureClass::RYNeg, GestureClass::RZPos, GestureClass::RZNeg,
};

constexpr std::size_t class_index(GestureClass c) { return static_cast<std::size_t>(c); }
constexpr bool is_translation(GestureClass c) {
  return c != GestureClass::Unrecognized && class_index(c) < 6;
}
constexpr bool is_rotation(GestureClass c) {
  return c != GestureClass::Unrecognized && class_index(c) >= 6;
}

/// "X+", "RZ-", ... ; "UNRECOGNIZED" for the sentinel.
std::string_view class_label(GestureClass c);
/// Accepts ASCII '-' or U+2212 for the minus sign; case-insensitive.
std::optional<GestureClass> parse_class(std::string_view label);

enum class Method : int { ZeroCrossing = 1, FirstFour = 2, Neural = 3 };

std::optional<Method> method_from_int(int m);

/// Window from the press sample to the first zero crossing of the dominant
/// gravity-compensated axis (inclusive). The dominant axis is the one with
/// the largest |mean| over the first four held samples.
GestureWindow segment_method1(const AccelTrace& trace, std::size_t press_index,
                              double epsilon_zero = kZeroCrossingEpsilon);

/// The four samples starting at press_index.
GestureWindow segment_method2(const AccelTrace& trace, std::size_t press_index);

/// Segmentation used by training, evaluation and the session for a given
/// method. Method 1 falls back to the first-four window when the hold has no
/// zero crossing (static postures never cross).
GestureWindow segment_for(const AccelTrace& trace, std::size_t press_index, Method method);

/// (ax, ay, az - 1) per sample.
std::vector<Vec3> gravity_compensate(const GestureWindow& window);

Vec3 mean_accel(const GestureWindow& window);
Vec3 mean_compensated(const GestureWindow& window);
/// Per-axis sample standard deviation (n-1 denominator); zero for n < 2.
Vec3 accel_stddev(const GestureWindow& window);

/// Indices where b_pressed goes false -> true (index 0 counts when pressed).
std::vector<std::size_t> press_indices(const AccelTrace& trace);

struct LabeledWindow {
  GestureWindow window;
  GestureClass label = GestureClass::Unrecognized;
};

struct LabeledCorpus {
  std::vector<LabeledWindow> entries;

  std::array<std::size_t, kNumClasses> class_counts() const;
  /// Classes with zero entries, in class order.
  std::vector<GestureClass> missing_classes() const;
};

/// A recorded demonstration: the trace, where the B press happened and what
/// it was meant to be.
struct LabeledTrace {
  AccelTrace trace;
  std::size_t press_index = 0;
  GestureClass label = GestureClass::Unrecognized;
};

LabeledCorpus build_corpus(const std::vector<LabeledTrace>& traces, Method method);

// Synthetic gestures ---------------------------------------------------------

struct GeneratorProfile {
  double amplitude_g = 0.6;      // peak of the acceleration lobe
  std::size_t crossing = 8;      // samples after the press where a = 0
  double centripetal_g = 1.0;    // RZ: -x acceleration at peak speed
  std::size_t lead_in = 5;       // rest samples before the press
  std::size_t tail = 5;          // rest samples after the release
  std::size_t posture_hold = 30; // held samples for static postures
  double rate_hz = kDefaultRateHz;
};

/// Deterministic for a fixed (class, noise_sigma, seed, profile). The press
/// happens at profile.lead_in.
AccelTrace generate_synthetic(GestureClass cls, double noise_sigma, std::uint64_t seed,
                              const GeneratorProfile& profile = {});

/// Per-sample ideal acceleration for the first samples after the press.
Vec3 synthetic_ideal(GestureClass cls, std::size_t offset, const GeneratorProfile& profile = {});

/// Gravity vector of a static posture; nullopt for dynamic classes.
std::optional<Vec3> posture_gravity(GestureClass cls);

}  // namespace gesteach
