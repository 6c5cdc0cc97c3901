#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dmap/data_matrix.hpp"

namespace dmap {

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double value);

/// Comma-separated writer: header row, LF endings, UTF-8 passthrough.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  void write_row(const std::vector<std::string>& fields);
  void write_row(std::span<const double> values);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Columns: value columns, then `intrinsic_<name>` columns if present.
void write_data_matrix_csv(const DataMatrix& data, const std::filesystem::path& path);

/// Inverse of write_data_matrix_csv; `intrinsic_` columns are split back out.
DataMatrix read_data_matrix_csv(const std::filesystem::path& path);

std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace dmap
