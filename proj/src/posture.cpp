#include "posture.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace gesteach {

const char* posture_name(Posture p) {
  switch (p) {
    case Posture::Horizontal: return "Horizontal";
    case Posture::RXPos: return "RX+";
    case Posture::RXNeg: return "RX-";
    case Posture::RYPos: return "RY+";
    case Posture::RYNeg: return "RY-";
    case Posture::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

bool is_static_window(const GestureWindow& window, const PostureThresholds& th) {
  const Vec3 sd = accel_stddev(window);
  return sd.x <= th.static_sigma && sd.y <= th.static_sigma && sd.z <= th.static_sigma;
}

PostureReading detect_posture(const GestureWindow& window, const PostureThresholds& th) {
  if (window.samples.size() != kShortWindowLength) {
    throw Error(ErrorCode::WrongWindowLength,
                "posture detection needs 4 samples, got " + std::to_string(window.samples.size()));
  }
  PostureReading r;
  r.is_static = is_static_window(window, th);
  if (!r.is_static) return r;

  const Vec3 m = mean_accel(window);
  int dominant = -1;
  for (int axis = 0; axis < 3; ++axis) {
    if (std::abs(m[axis]) < th.dominant_min) continue;
    bool minors_small = true;
    for (int other = 0; other < 3; ++other) {
      if (other != axis && std::abs(m[other]) > th.minor_max) minors_small = false;
    }
    if (minors_small) dominant = axis;
  }
  if (dominant < 0) return r;

  r.gravity_axis = dominant;
  r.gravity_sign = m[dominant] >= 0.0 ? 1 : -1;
  const bool pos = r.gravity_sign > 0;
  switch (dominant) {
    case 0: r.posture = pos ? Posture::RYNeg : Posture::RYPos; break;
    case 1:
      r.posture = (pos == th.positive_y_is_rx_neg) ? Posture::RXNeg : Posture::RXPos;
      break;
    default:
      // Upside down (-Z) is not a teaching posture.
      r.posture = pos ? Posture::Horizontal : Posture::Indeterminate;
      break;
  }
  return r;
}

std::optional<GestureClass> posture_to_class(Posture p) {
  switch (p) {
    case Posture::RXPos: return GestureClass::RXPos;
    case Posture::RXNeg: return GestureClass::RXNeg;
    case Posture::RYPos: return GestureClass::RYPos;
    case Posture::RYNeg: return GestureClass::RYNeg;
    default: return std::nullopt;
  }
}

}  // namespace gesteach
