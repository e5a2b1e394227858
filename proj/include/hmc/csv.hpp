#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace hmc::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Splits one record. Fields may be double-quoted; "" inside quotes is a
/// literal quote. Throws std::runtime_error on an unterminated quote.
std::vector<std::string> split_record(std::string_view line);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string quote_field(std::string_view field);

std::string join_record(const std::vector<std::string>& fields);

/// %.12g-style rendering used by every emitted table.
std::string format_number(double value, int significant = 12);

/// Reads header plus rows; blank lines are skipped. A trailing CR on each
/// line is dropped.
Table read(std::istream& in);
void write(const Table& table, std::ostream& out);

}  // namespace hmc::csv
