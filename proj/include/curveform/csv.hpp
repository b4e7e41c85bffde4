#pragma once

// CSV and number formatting utilities. All numeric output uses shortest
// round-trip decimal formatting so written files parse back to the exact
// same doubles.

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "curveform/curve.hpp"
#include "curveform/errors.hpp"

namespace curveform {

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, std::size_t line) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' ||
                         *(end - 1) == '\r')) --end;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end || begin == end) {
    throw ParseError("invalid number '" + std::string(text) + "'", line);
  }
  return value;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

inline std::string trim(std::string_view text) {
  std::size_t a = 0;
  std::size_t b = text.size();
  while (a < b && std::isspace(static_cast<unsigned char>(text[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(text[b - 1]))) --b;
  return std::string(text.substr(a, b - a));
}

/// Read a sample-point CSV with header "s,x,y". Rejects NaN/inf values and
/// malformed rows, reporting the offending line.
inline SampleSet read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::ios_base::failure("cannot open samples file: " + path);
  }
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw ParseError("empty samples file: " + path, 1);
  }
  ++line_no;
  const auto header = split_csv_line(line);
  if (header.size() != 3 || trim(header[0]) != "s" || trim(header[1]) != "x" ||
      trim(header[2]) != "y") {
    throw ParseError("expected header 's,x,y' in " + path, line_no);
  }
  SampleSet samples;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw ParseError("expected 3 fields in " + path, line_no);
    }
    const double s = parse_double(fields[0], line_no);
    const double x = parse_double(fields[1], line_no);
    const double y = parse_double(fields[2], line_no);
    if (!std::isfinite(s) || !std::isfinite(x) || !std::isfinite(y)) {
      throw ParseError("non-finite sample in " + path, line_no);
    }
    if (s < 0.0 || s > 1.0) {
      throw ParseError("sample parameter outside [0, 1] in " + path, line_no);
    }
    samples.s.push_back(s);
    samples.points.emplace_back(x, y);
  }
  return samples;
}

inline void write_samples_csv(const std::string& path,
                              const SampleSet& samples) {
  std::ofstream out(path);
  if (!out) {
    throw std::ios_base::failure("cannot write samples file: " + path);
  }
  out << "s,x,y\n";
  for (std::size_t k = 0; k < samples.size(); ++k) {
    out << format_double(samples.s[k]) << ',' << format_double(samples.points[k].x())
        << ',' << format_double(samples.points[k].y()) << '\n';
  }
}

}  // namespace curveform
