#pragma once

// Field of operation as the shell between two origin-centred spheres, and the
// pose increments that drive the robot to its limit along a commanded
// direction or about a commanded axis.

#include <array>
#include <optional>
#include <utility>

#include "signal.hpp"
#include "vec3.hpp"

namespace gesteach {

struct AngleLimits {
  double min_deg = -180.0;
  double max_deg = 180.0;
};

struct Workspace {
  double r_ext = 2012.0;  // mm
  double r_int = 0.0;     // mm, 0 disables the interior sphere
  double k_max = 2012.0;  // mm
  std::array<AngleLimits, 3> rot_limits{};

  /// Throws InvalidArgument unless 0 <= r_int < r_ext and k_max > 0.
  void validate() const;
  /// r_int^2 <= |p|^2 <= r_ext^2 with a relative tolerance of 1e-9.
  bool contains(Vec3 p) const;
};

struct Pose {
  double x = 0.0, y = 0.0, z = 0.0;     // mm
  double rx = 0.0, ry = 0.0, rz = 0.0;  // degrees

  Vec3 position() const { return {x, y, z}; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

/// [i1 i2 i3] translation in mm, [i4 i5 i6] rotation in degrees.
struct PoseIncrement {
  std::array<double, 6> i{};

  Vec3 translation() const { return {i[0], i[1], i[2]}; }
  bool is_zero() const;
  friend bool operator==(const PoseIncrement&, const PoseIncrement&) = default;
};

Pose apply(const Pose& pose, const PoseIncrement& inc);
PoseIncrement difference(const Pose& target, const Pose& from);

/// Unit movement direction.
struct Direction {
  Vec3 u;
};

inline constexpr double kDefaultDeadbandG = 0.05;

/// nullopt (no motion) when |a| < deadband, else a / |a|.
std::optional<Direction> normalize_direction(Vec3 a, double deadband = kDefaultDeadbandG);

/// Unit basis vector for a translation class; NotATranslation otherwise.
Direction class_to_direction(GestureClass cls);

/// Distance k >= 0 along u from pos to the first bounding sphere: the
/// nearest non-negative interior-sphere root when the ray enters the inner
/// sphere, else the positive exterior root; clamped to [0, k_max].
/// Degenerate when pos lies outside the shell.
double ray_workspace_exit(const Workspace& ws, Vec3 pos, Direction u);

/// k * u in the translation slots; zero increment for no motion.
PoseIncrement translation_increment(const Workspace& ws, Vec3 pos,
                                    const std::optional<Direction>& u);

/// Single rotation component up to the limit in the class's sign direction.
PoseIncrement rotation_increment(const Workspace& ws, const Pose& pose, GestureClass cls);

}  // namespace gesteach
