#pragma once

#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace rosq {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Comma-separated output with a mandatory header row.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::initializer_list<std::string> header);
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  void row(std::span<const double> values);
  void row(std::initializer_list<double> values);
  /// Mixed text and numbers, already formatted.
  void text_row(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace rosq
