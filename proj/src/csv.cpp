#include "rosq/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace rosq {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

CsvWriter::CsvWriter(std::ostream& out, std::initializer_list<std::string> header)
    : CsvWriter(out, std::vector<std::string>(header)) {}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  text_row(header);
}

void CsvWriter::row(std::span<const double> values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  text_row(cells);
}

void CsvWriter::row(std::initializer_list<double> values) {
  row(std::span<const double>(values.begin(), values.size()));
}

void CsvWriter::text_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("csv row has wrong column count");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

}  // namespace rosq
