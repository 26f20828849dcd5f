#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace gaudit {

using CsvRecord = std::vector<std::string>;

/// RFC 4180 style reader: quoted fields may contain commas, doubled quotes and
/// newlines. A trailing CR is stripped from each line.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}
  /// Returns false at end of input.
  bool next(CsvRecord& record);
  /// 1-based physical line on which the last record started.
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

std::string csv_escape(std::string_view field);
std::string csv_join(const std::vector<std::string>& fields);

/// Shortest decimal that parses back to the same double.
std::string format_number(double value);

/// Writes via a sibling temp file and rename, so readers never observe a
/// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace gaudit
