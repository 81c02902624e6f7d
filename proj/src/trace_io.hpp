#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "signal.hpp"

namespace gesteach {

/// Trace file: header `t_ms,ax,ay,az,b`, one sample per line.
/// Accelerations are clamped to +-3 g on load; t_ms must increase.
AccelTrace load_trace(const std::filesystem::path& path);
AccelTrace parse_trace(const std::string& text);
void save_trace(const AccelTrace& trace, const std::filesystem::path& path);
std::string format_trace(const AccelTrace& trace);

/// Corpus manifest: header `trace,press_index,label`; trace paths are
/// relative to the manifest's directory.
struct ManifestEntry {
  std::string trace_path;
  std::size_t press_index = 0;
  GestureClass label = GestureClass::Unrecognized;
};

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);
void save_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path);

/// Loads every trace named by the manifest.
std::vector<LabeledTrace> load_labeled_traces(const std::filesystem::path& manifest);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace gesteach
