#include "algcon/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace algcon {

TraceRecord::TraceRecord(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("trace needs at least one column");
}

void TraceRecord::append(std::vector<double> row) {
  if (row.size() != columns_.size()) {
    throw std::invalid_argument("trace row has " + std::to_string(row.size()) + " values, expected " +
                                std::to_string(columns_.size()));
  }
  if (!rows_.empty() && !(row.front() > rows_.back().front())) {
    throw std::logic_error("trace rows must be strictly increasing in " + columns_.front());
  }
  rows_.push_back(std::move(row));
}

std::size_t TraceRecord::column_index(const std::string& name) const {
  auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw std::out_of_range("no trace column '" + name + "'");
  return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<double> TraceRecord::column(const std::string& name) const {
  const auto idx = column_index(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[idx]);
  return out;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("format_real: to_chars failed");
  return std::string(buf, end);
}

std::string TraceRecord::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (c) out += ',';
    out += columns_[c];
  }
  out += '\n';
  for (const auto& r : rows_) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out += ',';
      out += format_real(r[c]);
    }
    out += '\n';
  }
  return out;
}

void TraceRecord::write_csv(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << to_csv();
  if (!f) throw std::runtime_error("failed writing " + path);
}

namespace {

double parse_real(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad CSV number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

TraceRecord parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
  TraceRecord t(split_line(line));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split_line(line)) row.push_back(parse_real(cell));
    t.append(std::move(row));
  }
  return t;
}

}  // namespace algcon
