#include "signal.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "error.hpp"

namespace gesteach {

AccelSample clamp_sample(AccelSample s) {
  s.ax = std::clamp(s.ax, -kAccelLimitG, kAccelLimitG);
  s.ay = std::clamp(s.ay, -kAccelLimitG, kAccelLimitG);
  s.az = std::clamp(s.az, -kAccelLimitG, kAccelLimitG);
  return s;
}

void validate_clock(const AccelTrace& trace) {
  if (!(trace.rate_hz > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "rate_hz must be positive");
  }
  const double nominal = 1000.0 / trace.rate_hz;
  for (std::size_t i = 1; i < trace.samples.size(); ++i) {
    const auto gap = trace.samples[i].t_ms - trace.samples[i - 1].t_ms;
    if (gap <= 0) {
      throw Error(ErrorCode::ClockError,
                  "non-increasing t_ms at sample " + std::to_string(i));
    }
    if (gap < 0.5 * nominal || gap > 1.5 * nominal) {
      throw Error(ErrorCode::ClockError, "sample gap of " + std::to_string(gap) +
                                             " ms at sample " + std::to_string(i) +
                                             " outside nominal +-50%");
    }
  }
}

namespace {

constexpr std::array<std::string_view, kNumClasses> kLabels = {
    "X+", "X-", "Y+", "Y-", "Z+", "Z-", "RX+", "RX-", "RY+", "RY-", "RZ+", "RZ-"};

}  // namespace

std::string_view class_label(GestureClass c) {
  if (c == GestureClass::Unrecognized) return "UNRECOGNIZED";
  return kLabels[class_index(c)];
}

std::optional<GestureClass> parse_class(std::string_view label) {
  std::string norm;
  for (std::size_t i = 0; i < label.size(); ++i) {
    // U+2212 MINUS SIGN is E2 88 92 in UTF-8.
    if (i + 2 < label.size() && static_cast<unsigned char>(label[i]) == 0xE2 &&
        static_cast<unsigned char>(label[i + 1]) == 0x88 &&
        static_cast<unsigned char>(label[i + 2]) == 0x92) {
      norm.push_back('-');
      i += 2;
      continue;
    }
    norm.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(label[i]))));
  }
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    if (norm == kLabels[i]) return kAllClasses[i];
  }
  return std::nullopt;
}

std::optional<Method> method_from_int(int m) {
  if (m < 1 || m > 3) return std::nullopt;
  return static_cast<Method>(m);
}

GestureWindow segment_method1(const AccelTrace& trace, std::size_t press_index,
                              double epsilon_zero) {
  const auto& s = trace.samples;
  if (press_index >= s.size() || !s[press_index].b_pressed ||
      (press_index > 0 && s[press_index - 1].b_pressed)) {
    throw Error(ErrorCode::InvalidArgument,
                "index " + std::to_string(press_index) + " is not a B press");
  }

  std::size_t held = 0;
  while (press_index + held < s.size() && s[press_index + held].b_pressed) ++held;

  const std::size_t prefix = std::min(held, kShortWindowLength);
  Vec3 mean;
  for (std::size_t i = 0; i < prefix; ++i) {
    const auto& p = s[press_index + i];
    mean = mean + Vec3{p.ax, p.ay, p.az - 1.0};
  }
  mean = mean / static_cast<double>(prefix);

  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (std::abs(mean[a]) > std::abs(mean[axis])) axis = a;
  }
  const bool positive = mean[axis] >= 0.0;

  for (std::size_t i = 0; i < held; ++i) {
    const auto& p = s[press_index + i];
    const double v = Vec3{p.ax, p.ay, p.az - 1.0}[axis];
    if (std::abs(v) < epsilon_zero || (v >= 0.0) != positive) {
      GestureWindow w;
      w.origin = press_index;
      w.samples.assign(s.begin() + static_cast<std::ptrdiff_t>(press_index),
                       s.begin() + static_cast<std::ptrdiff_t>(press_index + i + 1));
      return w;
    }
  }
  throw Error(ErrorCode::NoZeroCrossing,
              "B released before a zero crossing (press at " + std::to_string(press_index) + ")");
}

GestureWindow segment_method2(const AccelTrace& trace, std::size_t press_index) {
  const auto& s = trace.samples;
  if (press_index > s.size() || s.size() - press_index < kShortWindowLength) {
    throw Error(ErrorCode::InsufficientSamples,
                "fewer than 4 samples after index " + std::to_string(press_index));
  }
  GestureWindow w;
  w.origin = press_index;
  w.samples.assign(s.begin() + static_cast<std::ptrdiff_t>(press_index),
                   s.begin() + static_cast<std::ptrdiff_t>(press_index + kShortWindowLength));
  return w;
}

GestureWindow segment_for(const AccelTrace& trace, std::size_t press_index, Method method) {
  if (method == Method::ZeroCrossing) {
    try {
      return segment_method1(trace, press_index);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoZeroCrossing) throw;
    }
  }
  return segment_method2(trace, press_index);
}

std::vector<Vec3> gravity_compensate(const GestureWindow& window) {
  std::vector<Vec3> out;
  out.reserve(window.samples.size());
  for (const auto& s : window.samples) out.push_back({s.ax, s.ay, s.az - 1.0});
  return out;
}

Vec3 mean_accel(const GestureWindow& window) {
  Vec3 sum;
  if (window.samples.empty()) return sum;
  for (const auto& s : window.samples) sum = sum + s.accel();
  return sum / static_cast<double>(window.samples.size());
}

Vec3 mean_compensated(const GestureWindow& window) {
  Vec3 m = mean_accel(window);
  if (!window.samples.empty()) m.z -= 1.0;
  return m;
}

Vec3 accel_stddev(const GestureWindow& window) {
  const auto n = window.samples.size();
  if (n < 2) return {};
  const Vec3 m = mean_accel(window);
  Vec3 ss;
  for (const auto& s : window.samples) {
    const Vec3 d = s.accel() - m;
    ss = ss + Vec3{d.x * d.x, d.y * d.y, d.z * d.z};
  }
  ss = ss / static_cast<double>(n - 1);
  return {std::sqrt(ss.x), std::sqrt(ss.y), std::sqrt(ss.z)};
}

std::vector<std::size_t> press_indices(const AccelTrace& trace) {
  std::vector<std::size_t> out;
  bool prev = false;
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    const bool b = trace.samples[i].b_pressed;
    if (b && !prev) out.push_back(i);
    prev = b;
  }
  return out;
}

std::array<std::size_t, kNumClasses> LabeledCorpus::class_counts() const {
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& e : entries) {
    if (e.label != GestureClass::Unrecognized) ++counts[class_index(e.label)];
  }
  return counts;
}

std::vector<GestureClass> LabeledCorpus::missing_classes() const {
  const auto counts = class_counts();
  std::vector<GestureClass> missing;
  for (auto c : kAllClasses) {
    if (counts[class_index(c)] == 0) missing.push_back(c);
  }
  return missing;
}

LabeledCorpus build_corpus(const std::vector<LabeledTrace>& traces, Method method) {
  LabeledCorpus corpus;
  corpus.entries.reserve(traces.size());
  for (const auto& t : traces) {
    if (t.label == GestureClass::Unrecognized) {
      throw Error(ErrorCode::UnknownClass, "corpus entries must carry one of the 12 classes");
    }
    corpus.entries.push_back({segment_for(t.trace, t.press_index, method), t.label});
  }
  return corpus;
}

// Synthetic gestures ---------------------------------------------------------

std::optional<Vec3> posture_gravity(GestureClass cls) {
  switch (cls) {
    case GestureClass::RYNeg: return Vec3{1.0, 0.0, 0.0};
    case GestureClass::RYPos: return Vec3{-1.0, 0.0, 0.0};
    case GestureClass::RXNeg: return Vec3{0.0, 1.0, 0.0};
    case GestureClass::RXPos: return Vec3{0.0, -1.0, 0.0};
    default: return std::nullopt;
  }
}

namespace {

// Two-lobe acceleration: positive until the peak-speed instant at
// offset == crossing, then the mirrored deceleration lobe.
double pulse(std::size_t offset, const GeneratorProfile& p) {
  const std::size_t span = 2 * (p.crossing + 1);
  if (offset >= span) return 0.0;
  const double phase = std::numbers::pi * static_cast<double>(offset + 1) /
                       static_cast<double>(p.crossing + 1);
  const double v = p.amplitude_g * std::sin(phase);
  // sin(pi) is not exactly zero in floating point.
  return offset == p.crossing || offset + 1 == span ? 0.0 : v;
}

// Speed at `offset` as a fraction of peak speed (running sum of the pulse).
double speed_fraction(std::size_t offset, const GeneratorProfile& p) {
  double peak = 0.0;
  for (std::size_t i = 0; i <= p.crossing; ++i) peak += pulse(i, p);
  double v = 0.0;
  for (std::size_t i = 0; i <= offset; ++i) v += pulse(i, p);
  return peak > 0.0 ? std::max(0.0, v / peak) : 0.0;
}

}  // namespace

Vec3 synthetic_ideal(GestureClass cls, std::size_t offset, const GeneratorProfile& p) {
  if (auto g = posture_gravity(cls)) return *g;
  const double a = pulse(offset, p);
  switch (cls) {
    case GestureClass::XPos: return {a, 0.0, 1.0};
    case GestureClass::XNeg: return {-a, 0.0, 1.0};
    case GestureClass::YPos: return {0.0, a, 1.0};
    case GestureClass::YNeg: return {0.0, -a, 1.0};
    case GestureClass::ZPos: return {0.0, 0.0, 1.0 + a};
    case GestureClass::ZNeg: return {0.0, 0.0, 1.0 - a};
    case GestureClass::RZPos:
    case GestureClass::RZNeg: {
      // Twist about Z with the sensor ahead of the wrist: tangential on Y,
      // centripetal toward the wrist (-X) growing with speed squared.
      const double f = speed_fraction(offset, p);
      const double tangential = cls == GestureClass::RZPos ? a : -a;
      return {-p.centripetal_g * f * f, tangential, 1.0};
    }
    default: break;
  }
  throw Error(ErrorCode::UnknownClass, "no synthetic profile for Unrecognized");
}

AccelTrace generate_synthetic(GestureClass cls, double noise_sigma, std::uint64_t seed,
                              const GeneratorProfile& p) {
  if (cls == GestureClass::Unrecognized) {
    throw Error(ErrorCode::UnknownClass, "cannot synthesize Unrecognized");
  }
  if (!(noise_sigma >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise_sigma must be >= 0");
  }
  if (!(p.rate_hz > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "rate_hz must be positive");
  }

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(class_index(cls))};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> noise(0.0, 1.0);
  auto jitter = [&] { return noise_sigma > 0.0 ? noise_sigma * noise(rng) : 0.0; };

  const std::size_t held = posture_gravity(cls) ? p.posture_hold : 2 * (p.crossing + 1);
  const std::size_t total = p.lead_in + held + p.tail;
  const double dt = 1000.0 / p.rate_hz;

  AccelTrace trace;
  trace.rate_hz = p.rate_hz;
  trace.samples.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    const bool pressed = i >= p.lead_in && i < p.lead_in + held;
    // Postures stay rotated until the release; the hand is level otherwise.
    const Vec3 ideal = pressed ? synthetic_ideal(cls, i - p.lead_in, p) : Vec3{0.0, 0.0, 1.0};
    AccelSample s;
    s.t_ms = static_cast<std::int64_t>(std::llround(static_cast<double>(i) * dt));
    s.ax = ideal.x + jitter();
    s.ay = ideal.y + jitter();
    s.az = ideal.z + jitter();
    s.b_pressed = pressed;
    trace.samples.push_back(clamp_sample(s));
  }
  return trace;
}

}  // namespace gesteach
