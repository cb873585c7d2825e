#include "ssc/sample_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

namespace ssc {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_double(std::string_view field, std::size_t line_no) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": not a number: '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

LabeledSample<double> read_sample(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    columns = split(trim(line)).size();
    break;
  }
  if (columns < 2) throw ParseError("missing header row with at least one coordinate and a label");

  const auto dim = static_cast<Eigen::Index>(columns - 1);
  std::vector<double> coords;
  std::vector<Label> labels;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = trim(line);
    if (row.empty()) continue;
    const auto fields = split(row);
    if (fields.size() != columns) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                       " columns, got " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c + 1 < columns; ++c) {
      const double v = parse_double(fields[c], line_no);
      if (!std::isfinite(v)) throw ParseError("line " + std::to_string(line_no) + ": non-finite coordinate");
      coords.push_back(v);
    }
    const double y = parse_double(fields.back(), line_no);
    if (y != 1.0 && y != -1.0) {
      throw ParseError("line " + std::to_string(line_no) + ": label must be -1 or 1");
    }
    labels.push_back(y > 0 ? Label::Positive : Label::Negative);
  }

  PointMatrix<double> points(static_cast<Eigen::Index>(labels.size()), dim);
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) points(r, c) = coords[static_cast<std::size_t>(r * dim + c)];
  }
  return LabeledSample<double>(std::move(points), std::move(labels));
}

LabeledSample<double> read_sample_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_sample(in);
}

void write_sample(std::ostream& out, const LabeledSample<double>& S) {
  for (Eigen::Index c = 0; c < S.dim(); ++c) out << 'x' << (c + 1) << ',';
  out << "label\n";
  char buf[32];
  for (std::size_t i = 0; i < S.size(); ++i) {
    for (Eigen::Index c = 0; c < S.dim(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", S.points()(static_cast<Eigen::Index>(i), c));
      out << buf << ',';
    }
    out << to_int(S.label(i)) << '\n';
  }
}

void write_sample_file(const std::string& path, const LabeledSample<double>& S) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  write_sample(out, S);
}

}  // namespace ssc
