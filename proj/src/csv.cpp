#include "dmap/csv.hpp"

#include <charconv>
#include <sstream>

#include "dmap/errors.hpp"

namespace dmap {

namespace {

constexpr std::string_view kIntrinsicPrefix = "intrinsic_";

double parse_double(std::string_view field, const std::filesystem::path& path, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw IoError(path.string() + ":" + std::to_string(line) + ": cannot parse '" + std::string(field) + "'");
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
  if (!out_) throw IoError("write failed: " + path_.string());
}

void CsvWriter::write_row(std::span<const double> values) {
  std::vector<std::string> fields;
  fields.reserve(values.size());
  for (double v : values) fields.push_back(format_double(v));
  write_row(fields);
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    fields.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

void write_data_matrix_csv(const DataMatrix& data, const std::filesystem::path& path) {
  CsvWriter csv(path);
  std::vector<std::string> header = data.column_names;
  for (const auto& name : data.intrinsic_names) header.push_back(std::string(kIntrinsicPrefix) + name);
  csv.write_row(header);
  const Index q = data.intrinsic ? data.intrinsic->cols() : 0;
  std::vector<double> row(static_cast<std::size_t>(data.cols() + q));
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.cols(); ++j) row[static_cast<std::size_t>(j)] = data.values(i, j);
    for (Index j = 0; j < q; ++j) row[static_cast<std::size_t>(data.cols() + j)] = (*data.intrinsic)(i, j);
    csv.write_row(row);
  }
}

DataMatrix read_data_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  const auto header = split_csv_line(line);

  DataMatrix data;
  std::vector<bool> is_intrinsic;
  for (const auto& name : header) {
    const bool intrinsic = name.starts_with(kIntrinsicPrefix);
    is_intrinsic.push_back(intrinsic);
    if (intrinsic)
      data.intrinsic_names.push_back(name.substr(kIntrinsicPrefix.size()));
    else
      data.column_names.push_back(name);
  }

  std::vector<std::vector<double>> values, intrinsic;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                    " fields, got " + std::to_string(fields.size()));
    auto& v = values.emplace_back();
    auto& q = intrinsic.emplace_back();
    for (std::size_t j = 0; j < fields.size(); ++j)
      (is_intrinsic[j] ? q : v).push_back(parse_double(fields[j], path, line_no));
  }

  const auto n = static_cast<Index>(values.size());
  data.values.resize(n, static_cast<Index>(data.column_names.size()));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < data.values.cols(); ++j) data.values(i, j) = values[i][j];
  if (!data.intrinsic_names.empty()) {
    Eigen::MatrixXd block(n, static_cast<Index>(data.intrinsic_names.size()));
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < block.cols(); ++j) block(i, j) = intrinsic[i][j];
    data.intrinsic = std::move(block);
  }
  return data;
}

}  // namespace dmap
