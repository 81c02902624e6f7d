#include "workspace.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace gesteach {

void Workspace::validate() const {
  if (!(r_int >= 0.0 && r_int < r_ext)) {
    throw Error(ErrorCode::InvalidArgument, "workspace needs 0 <= r_int < r_ext");
  }
  if (!(k_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "workspace needs k_max > 0");
  for (const auto& l : rot_limits) {
    if (!(l.min_deg <= l.max_deg)) {
      throw Error(ErrorCode::InvalidArgument, "rotation limit min exceeds max");
    }
  }
}

bool Workspace::contains(Vec3 p) const {
  const double r2 = dot(p, p);
  const double tol = 1e-9;
  return r2 <= r_ext * r_ext * (1.0 + tol) && r2 >= r_int * r_int * (1.0 - tol);
}

bool PoseIncrement::is_zero() const {
  return std::all_of(i.begin(), i.end(), [](double v) { return v == 0.0; });
}

Pose apply(const Pose& p, const PoseIncrement& inc) {
  return {p.x + inc.i[0], p.y + inc.i[1], p.z + inc.i[2],
          p.rx + inc.i[3], p.ry + inc.i[4], p.rz + inc.i[5]};
}

PoseIncrement difference(const Pose& target, const Pose& from) {
  return {{target.x - from.x, target.y - from.y, target.z - from.z, target.rx - from.rx,
           target.ry - from.ry, target.rz - from.rz}};
}

std::optional<Direction> normalize_direction(Vec3 a, double deadband) {
  const double n = norm(a);
  if (!(n >= deadband) || n == 0.0) return std::nullopt;
  return Direction{a / n};
}

Direction class_to_direction(GestureClass cls) {
  switch (cls) {
    case GestureClass::XPos: return {{1.0, 0.0, 0.0}};
    case GestureClass::XNeg: return {{-1.0, 0.0, 0.0}};
    case GestureClass::YPos: return {{0.0, 1.0, 0.0}};
    case GestureClass::YNeg: return {{0.0, -1.0, 0.0}};
    case GestureClass::ZPos: return {{0.0, 0.0, 1.0}};
    case GestureClass::ZNeg: return {{0.0, 0.0, -1.0}};
    default: break;
  }
  throw Error(ErrorCode::NotATranslation,
              std::string(class_label(cls)) + " is not a translation class");
}

double ray_workspace_exit(const Workspace& ws, Vec3 pos, Direction dir) {
  if (!ws.contains(pos)) {
    throw Error(ErrorCode::Degenerate, "position lies outside the field of operation");
  }
  const Vec3 u = dir.u;
  // |pos + k u|^2 = R^2 with |u| = 1:  k^2 + 2 b k + c = 0.
  const double b = dot(pos, u);
  const double p2 = dot(pos, pos);
  double k = std::numeric_limits<double>::infinity();

  if (ws.r_int > 0.0 && b < 0.0) {
    const double c = p2 - ws.r_int * ws.r_int;
    const double disc = b * b - c;
    if (disc > 0.0) {
      // Both roots share a sign because pos is outside the inner sphere; the
      // near one is where the ray enters it.
      k = std::max(0.0, -b - std::sqrt(disc));
    }
  }

  const double c = p2 - ws.r_ext * ws.r_ext;
  const double disc = b * b - c;
  assert(disc >= 0.0);  // pos is inside the outer sphere
  const double root = std::sqrt(std::max(0.0, disc));
  // -b + sqrt(b^2 - c), written to avoid cancellation when b > 0.
  const double k_ext = b > 0.0 ? -c / (b + root) : root - b;
  k = std::min(k, std::max(0.0, k_ext));

  return std::clamp(k, 0.0, ws.k_max);
}

PoseIncrement translation_increment(const Workspace& ws, Vec3 pos,
                                    const std::optional<Direction>& u) {
  PoseIncrement inc;
  if (!u) return inc;
  const double k = ray_workspace_exit(ws, pos, *u);
  inc.i[0] = k * u->u.x;
  inc.i[1] = k * u->u.y;
  inc.i[2] = k * u->u.z;
  return inc;
}

PoseIncrement rotation_increment(const Workspace& ws, const Pose& pose, GestureClass cls) {
  int axis = -1;
  bool positive = true;
  switch (cls) {
    case GestureClass::RXPos: axis = 0; break;
    case GestureClass::RXNeg: axis = 0; positive = false; break;
    case GestureClass::RYPos: axis = 1; break;
    case GestureClass::RYNeg: axis = 1; positive = false; break;
    case GestureClass::RZPos: axis = 2; break;
    case GestureClass::RZNeg: axis = 2; positive = false; break;
    default:
      throw Error(ErrorCode::NotARotation,
                  std::string(class_label(cls)) + " is not a rotation class");
  }
  const double current = axis == 0 ? pose.rx : (axis == 1 ? pose.ry : pose.rz);
  const auto& lim = ws.rot_limits[static_cast<std::size_t>(axis)];
  PoseIncrement inc;
  // Never push further past a limit the pose already sits on or beyond.
  inc.i[static_cast<std::size_t>(3 + axis)] =
      positive ? std::max(0.0, lim.max_deg - current) : std::min(0.0, lim.min_deg - current);
  return inc;
}

}  // namespace gesteach
