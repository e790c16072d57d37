#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace algcon {

/// Ordered rows of named real columns. The first column is the iteration
/// index and must be strictly increasing.
class TraceRecord {
 public:
  TraceRecord() = default;
  explicit TraceRecord(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  void append(std::vector<double> row);

  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;

  /// Run metadata (seed, config hash, version); not written to the CSV body.
  std::map<std::string, std::string>& metadata() noexcept { return metadata_; }
  const std::map<std::string, std::string>& metadata() const noexcept { return metadata_; }

  /// Header line plus one line per row, '.' decimal, 17 significant digits.
  std::string to_csv() const;
  void write_csv(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
  std::map<std::string, std::string> metadata_;
};

/// Locale-independent shortest-safe formatting with 17 significant digits.
std::string format_real(double v);

/// Parses a CSV produced by TraceRecord::to_csv.
TraceRecord parse_trace_csv(const std::string& text);

}  // namespace algcon
