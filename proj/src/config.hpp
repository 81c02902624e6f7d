#pragma once

// Robot profiles and the session configuration document (JSON).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "force_guard.hpp"
#include "posture.hpp"
#include "robot_sim.hpp"
#include "signal.hpp"
#include "workspace.hpp"

namespace gesteach {

struct RobotProfile {
  std::string name = "HP6-like";
  Workspace workspace;
  Pose home{1000.0, 0.0, 800.0, 0.0, 0.0, 0.0};
  MotionSpeed speed;
};

RobotProfile hp6_profile();
RobotProfile irb140_profile();

/// "hp6", "HP6-like", "irb140", "IRB140-like" (case-insensitive) or a path
/// to a profile JSON file.
RobotProfile resolve_profile(const std::string& name_or_path);

RobotProfile profile_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const RobotProfile& p);

struct SessionConfig {
  int mode = 1;  // 1: axis-separated, 2: free direction
  Method recognizer = Method::Neural;
  double accept_threshold = 0.8;
  double command_confidence_min = 0.70;
  double deadband_g = kDefaultDeadbandG;
  std::optional<MotionSpeed> speed;  // defaults to the profile speed
  PostureThresholds posture;
  double force_alert_n = 20.0;
  double torque_alert_nm = 2.0;
  double force_p = 0.25;
  ContactSurface contact;
  std::string profile = "hp6";
  std::int64_t tick_ms = 10;
  std::int64_t watchdog_timeout_ms = 200;
  std::string program_name = "TEACH";
  std::string stat_model_path;  // optional model files loaded at startup
  std::string ann_model_path;

  /// Throws InvalidArgument on out-of-range values.
  void validate() const;
  ForceThresholds force_thresholds() const;
};

/// Missing keys keep their defaults; unknown keys are rejected.
SessionConfig session_config_from_json(const nlohmann::json& j);
nlohmann::json session_config_to_json(const SessionConfig& c);
SessionConfig load_session_config(const std::filesystem::path& path);

/// Applies GESTEACH_ENDPOINT / GESTEACH_TIMEOUT_MS when set.
struct GatewaySettings {
  std::string endpoint = "127.0.0.1:8765";
  std::int64_t timeout_ms = 200;
};
GatewaySettings apply_environment(GatewaySettings s);

/// FNV-1a 64 over the canonical dump; printed in reports.
std::string config_hash(const nlohmann::json& j);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace gesteach
