#include "trace_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include "error.hpp"

namespace gesteach {

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                    : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + what);
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no, const char* name) {
  T value{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    parse_fail(line_no, std::string("bad ") + name + " '" + std::string(field) + "'");
  }
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

// Yields (1-based line number, line) for non-empty lines, CR stripped.
template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line(text.data() + pos,
                          (nl == std::string::npos ? text.size() : nl) - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) fn(line_no, line);
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error(ErrorCode::Internal, "to_chars failed");
  return std::string(buf, ptr);
}

AccelTrace parse_trace(const std::string& text) {
  AccelTrace trace;
  bool header_seen = false;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (!header_seen) {
      if (line != "t_ms,ax,ay,az,b") parse_fail(line_no, "expected header t_ms,ax,ay,az,b");
      header_seen = true;
      return;
    }
    const auto f = split_csv(line);
    if (f.size() != 5) parse_fail(line_no, "expected 5 fields, got " + std::to_string(f.size()));
    AccelSample s;
    s.t_ms = parse_number<std::int64_t>(f[0], line_no, "t_ms");
    s.ax = parse_number<double>(f[1], line_no, "ax");
    s.ay = parse_number<double>(f[2], line_no, "ay");
    s.az = parse_number<double>(f[3], line_no, "az");
    if (f[4] == "1") {
      s.b_pressed = true;
    } else if (f[4] != "0") {
      parse_fail(line_no, "b must be 0 or 1");
    }
    if (!trace.samples.empty() && s.t_ms <= trace.samples.back().t_ms) {
      throw Error(ErrorCode::ClockError, "line " + std::to_string(line_no) +
                                             ": non-increasing t_ms " + std::to_string(s.t_ms));
    }
    trace.samples.push_back(clamp_sample(s));
  });
  if (!header_seen) throw Error(ErrorCode::ParseError, "line 1: empty trace file");
  return trace;
}

AccelTrace load_trace(const std::filesystem::path& path) { return parse_trace(read_file(path)); }

std::string format_trace(const AccelTrace& trace) {
  std::string out = "t_ms,ax,ay,az,b\n";
  for (const auto& s : trace.samples) {
    out += std::to_string(s.t_ms);
    out += ',';
    out += format_double(s.ax);
    out += ',';
    out += format_double(s.ay);
    out += ',';
    out += format_double(s.az);
    out += s.b_pressed ? ",1\n" : ",0\n";
  }
  return out;
}

void save_trace(const AccelTrace& trace, const std::filesystem::path& path) {
  write_file(path, format_trace(trace));
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<ManifestEntry> entries;
  bool header_seen = false;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (!header_seen) {
      if (line != "trace,press_index,label") {
        parse_fail(line_no, "expected header trace,press_index,label");
      }
      header_seen = true;
      return;
    }
    const auto f = split_csv(line);
    if (f.size() != 3) parse_fail(line_no, "expected 3 fields");
    ManifestEntry e;
    e.trace_path = std::string(f[0]);
    e.press_index = parse_number<std::size_t>(f[1], line_no, "press_index");
    auto label = parse_class(f[2]);
    if (!label) {
      throw Error(ErrorCode::UnknownClass,
                  "line " + std::to_string(line_no) + ": unknown class '" + std::string(f[2]) + "'");
    }
    e.label = *label;
    entries.push_back(std::move(e));
  });
  return entries;
}

void save_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path) {
  std::string out = "trace,press_index,label\n";
  for (const auto& e : entries) {
    out += e.trace_path + "," + std::to_string(e.press_index) + "," +
           std::string(class_label(e.label)) + "\n";
  }
  write_file(path, out);
}

std::vector<LabeledTrace> load_labeled_traces(const std::filesystem::path& manifest) {
  const auto base = manifest.parent_path();
  std::vector<LabeledTrace> out;
  for (const auto& e : load_manifest(manifest)) {
    std::filesystem::path p(e.trace_path);
    if (p.is_relative()) p = base / p;
    out.push_back({load_trace(p), e.press_index, e.label});
  }
  return out;
}

}  // namespace gesteach
