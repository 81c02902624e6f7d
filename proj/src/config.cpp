#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "error.hpp"

namespace gesteach {

using nlohmann::json;

RobotProfile hp6_profile() {
  RobotProfile p;
  p.name = "HP6-like";
  p.workspace.r_ext = 2012.0;
  p.workspace.r_int = 200.0;
  p.workspace.k_max = 2012.0;
  p.home = {1000.0, 0.0, 800.0, 0.0, 0.0, 0.0};
  p.speed = {75.0, 20.0};
  return p;
}

RobotProfile irb140_profile() {
  RobotProfile p;
  p.name = "IRB140-like";
  p.workspace.r_ext = 810.0;
  p.workspace.r_int = 150.0;
  p.workspace.k_max = 1620.0;
  p.workspace.rot_limits = {AngleLimits{-170.0, 170.0}, AngleLimits{-120.0, 120.0},
                            AngleLimits{-180.0, 180.0}};
  p.home = {500.0, 0.0, 400.0, 0.0, 0.0, 0.0};
  p.speed = {75.0, 20.0};
  return p;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* what) {
  std::set<std::string> allowed(known.begin(), known.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw Error(ErrorCode::ParseError, std::string(what) + ": unknown key '" + it.key() + "'");
    }
  }
}

}  // namespace

RobotProfile profile_from_json(const json& j) {
  try {
    reject_unknown(j, {"name", "r_ext", "r_int", "k_max", "rot_limits", "home", "speed_mm_s",
                       "rot_speed_deg_s"},
                   "robot profile");
    RobotProfile p;
    p.name = j.at("name").get<std::string>();
    p.workspace.r_ext = j.at("r_ext").get<double>();
    p.workspace.r_int = get_or(j, "r_int", 0.0);
    p.workspace.k_max = j.at("k_max").get<double>();
    if (auto it = j.find("rot_limits"); it != j.end()) {
      if (it->size() != 3) throw Error(ErrorCode::ParseError, "rot_limits needs 3 pairs");
      for (std::size_t a = 0; a < 3; ++a) {
        p.workspace.rot_limits[a] = {(*it)[a].at(0).get<double>(), (*it)[a].at(1).get<double>()};
      }
    }
    if (auto it = j.find("home"); it != j.end()) {
      const auto h = it->get<std::vector<double>>();
      if (h.size() != 6) throw Error(ErrorCode::ParseError, "home needs 6 values");
      p.home = {h[0], h[1], h[2], h[3], h[4], h[5]};
    }
    p.speed.linear_mm_s = get_or(j, "speed_mm_s", 75.0);
    p.speed.angular_deg_s = get_or(j, "rot_speed_deg_s", 20.0);
    p.workspace.validate();
    if (!p.workspace.contains(p.home.position())) {
      throw Error(ErrorCode::InvalidArgument, "profile home lies outside the workspace");
    }
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("robot profile: ") + e.what());
  }
}

json profile_to_json(const RobotProfile& p) {
  json limits = json::array();
  for (const auto& l : p.workspace.rot_limits) limits.push_back({l.min_deg, l.max_deg});
  return {{"name", p.name},
          {"r_ext", p.workspace.r_ext},
          {"r_int", p.workspace.r_int},
          {"k_max", p.workspace.k_max},
          {"rot_limits", limits},
          {"home", {p.home.x, p.home.y, p.home.z, p.home.rx, p.home.ry, p.home.rz}},
          {"speed_mm_s", p.speed.linear_mm_s},
          {"rot_speed_deg_s", p.speed.angular_deg_s}};
}

RobotProfile resolve_profile(const std::string& name_or_path) {
  const auto key = lower(name_or_path);
  if (key == "hp6" || key == "hp6-like") return hp6_profile();
  if (key == "irb140" || key == "irb140-like") return irb140_profile();
  try {
    return profile_from_json(json::parse(read_text_file(name_or_path)));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, name_or_path + ": " + e.what());
  }
}

void SessionConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidArgument, m); };
  if (mode != 1 && mode != 2) fail("mode must be 1 or 2");
  if (!(command_confidence_min >= 0.0 && command_confidence_min <= 1.0)) {
    fail("command_confidence_min must lie in [0, 1]");
  }
  if (!(accept_threshold >= 0.0 && accept_threshold <= 1.0)) fail("accept_threshold must lie in [0, 1]");
  if (!(deadband_g >= 0.0)) fail("deadband must be >= 0");
  if (speed && (!(speed->linear_mm_s > 0.0) || !(speed->angular_deg_s > 0.0))) {
    fail("speed must be positive");
  }
  if (tick_ms <= 0) fail("tick_ms must be positive");
  if (watchdog_timeout_ms <= 0) fail("watchdog timeout must be positive");
  if (!(contact.stiffness >= 0.0)) fail("contact stiffness must be >= 0");
  (void)force_thresholds();
}

ForceThresholds SessionConfig::force_thresholds() const {
  return ForceThresholds(force_alert_n, force_p, torque_alert_nm);
}

SessionConfig session_config_from_json(const json& j) {
  try {
    reject_unknown(j,
                   {"mode", "recognizer", "accept_threshold", "command_confidence_min", "deadband_g",
                    "speed_mm_s", "rot_speed_deg_s", "posture", "force", "contact", "profile",
                    "tick_ms", "watchdog_timeout_ms", "program_name", "stat_model", "ann_model"},
                   "session config");
    SessionConfig c;
    c.mode = get_or(j, "mode", c.mode);
    if (auto it = j.find("recognizer"); it != j.end()) {
      auto m = method_from_int(it->get<int>());
      if (!m) throw Error(ErrorCode::InvalidArgument, "recognizer must be 1, 2 or 3");
      c.recognizer = *m;
    }
    c.accept_threshold = get_or(j, "accept_threshold", c.accept_threshold);
    c.command_confidence_min = get_or(j, "command_confidence_min", c.command_confidence_min);
    c.deadband_g = get_or(j, "deadband_g", c.deadband_g);
    if (j.contains("speed_mm_s") || j.contains("rot_speed_deg_s")) {
      MotionSpeed s;
      s.linear_mm_s = get_or(j, "speed_mm_s", s.linear_mm_s);
      s.angular_deg_s = get_or(j, "rot_speed_deg_s", s.angular_deg_s);
      c.speed = s;
    }
    if (auto it = j.find("posture"); it != j.end()) {
      reject_unknown(*it, {"static_sigma", "dominant_min", "minor_max", "positive_y_is_rx_neg"},
                     "posture");
      c.posture.static_sigma = get_or(*it, "static_sigma", c.posture.static_sigma);
      c.posture.dominant_min = get_or(*it, "dominant_min", c.posture.dominant_min);
      c.posture.minor_max = get_or(*it, "minor_max", c.posture.minor_max);
      c.posture.positive_y_is_rx_neg =
          get_or(*it, "positive_y_is_rx_neg", c.posture.positive_y_is_rx_neg);
    }
    if (auto it = j.find("force"); it != j.end()) {
      reject_unknown(*it, {"alert_n", "torque_alert_nm", "p"}, "force");
      c.force_alert_n = get_or(*it, "alert_n", c.force_alert_n);
      c.torque_alert_nm = get_or(*it, "torque_alert_nm", c.torque_alert_nm);
      c.force_p = get_or(*it, "p", c.force_p);
    }
    if (auto it = j.find("contact"); it != j.end()) {
      reject_unknown(*it, {"z_s", "stiffness", "tool_weight"}, "contact");
      c.contact.z_s = get_or(*it, "z_s", c.contact.z_s);
      c.contact.stiffness = get_or(*it, "stiffness", c.contact.stiffness);
      c.contact.tool_weight = get_or(*it, "tool_weight", c.contact.tool_weight);
    }
    c.profile = get_or<std::string>(j, "profile", c.profile);
    c.tick_ms = get_or(j, "tick_ms", c.tick_ms);
    c.watchdog_timeout_ms = get_or(j, "watchdog_timeout_ms", c.watchdog_timeout_ms);
    c.program_name = get_or<std::string>(j, "program_name", c.program_name);
    c.stat_model_path = get_or<std::string>(j, "stat_model", c.stat_model_path);
    c.ann_model_path = get_or<std::string>(j, "ann_model", c.ann_model_path);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("session config: ") + e.what());
  }
}

json session_config_to_json(const SessionConfig& c) {
  json j = {
      {"mode", c.mode},
      {"recognizer", static_cast<int>(c.recognizer)},
      {"accept_threshold", c.accept_threshold},
      {"command_confidence_min", c.command_confidence_min},
      {"deadband_g", c.deadband_g},
      {"posture",
       {{"static_sigma", c.posture.static_sigma},
        {"dominant_min", c.posture.dominant_min},
        {"minor_max", c.posture.minor_max},
        {"positive_y_is_rx_neg", c.posture.positive_y_is_rx_neg}}},
      {"force", {{"alert_n", c.force_alert_n}, {"torque_alert_nm", c.torque_alert_nm}, {"p", c.force_p}}},
      {"contact",
       {{"z_s", c.contact.z_s}, {"stiffness", c.contact.stiffness}, {"tool_weight", c.contact.tool_weight}}},
      {"profile", c.profile},
      {"tick_ms", c.tick_ms},
      {"watchdog_timeout_ms", c.watchdog_timeout_ms},
      {"program_name", c.program_name},
  };
  if (c.speed) {
    j["speed_mm_s"] = c.speed->linear_mm_s;
    j["rot_speed_deg_s"] = c.speed->angular_deg_s;
  }
  if (!c.stat_model_path.empty()) j["stat_model"] = c.stat_model_path;
  if (!c.ann_model_path.empty()) j["ann_model"] = c.ann_model_path;
  return j;
}

SessionConfig load_session_config(const std::filesystem::path& path) {
  try {
    return session_config_from_json(json::parse(read_text_file(path)));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

GatewaySettings apply_environment(GatewaySettings s) {
  if (const char* ep = std::getenv("GESTEACH_ENDPOINT"); ep && *ep) s.endpoint = ep;
  if (const char* t = std::getenv("GESTEACH_TIMEOUT_MS"); t && *t) {
    char* end = nullptr;
    const long long v = std::strtoll(t, &end, 10);
    if (end == t || *end != '\0' || v <= 0) {
      throw Error(ErrorCode::InvalidArgument, "GESTEACH_TIMEOUT_MS must be a positive integer");
    }
    s.timeout_ms = v;
  }
  return s;
}

std::string config_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gesteach
