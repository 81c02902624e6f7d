#pragma once

// Static hand postures read off the gravity vector. Rotation about Z leaves
// gravity on Z, so RZ+/RZ- can never be decided here.

#include <optional>

#include "signal.hpp"

namespace gesteach {

enum class Posture { Horizontal, RXPos, RXNeg, RYPos, RYNeg, Indeterminate };

const char* posture_name(Posture p);

struct PostureThresholds {
  double static_sigma = 0.08;
  double dominant_min = 0.8;
  double minor_max = 0.3;
  // Sign of ay that means RX-. The X/RY pairing is fixed; this one is a
  // convention.
  bool positive_y_is_rx_neg = true;
};

struct PostureReading {
  Posture posture = Posture::Indeterminate;
  int gravity_axis = -1;  // 0, 1, 2 or -1 when no axis dominates
  int gravity_sign = 0;   // +1 / -1, 0 when no axis dominates
  bool is_static = false;
};

bool is_static_window(const GestureWindow& window, const PostureThresholds& th = {});

/// Requires a 4-sample window (WrongWindowLength otherwise).
PostureReading detect_posture(const GestureWindow& window, const PostureThresholds& th = {});

/// Z rotations are routed to the network, never to detect_posture.
constexpr bool rz_requires_ann() { return true; }

std::optional<GestureClass> posture_to_class(Posture p);

}  // namespace gesteach
