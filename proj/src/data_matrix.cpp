#include "dmap/data_matrix.hpp"

#include <string>

#include "dmap/errors.hpp"

namespace dmap {

void DataMatrix::validate() const {
  if (values.rows() < 2) throw ParameterError("data needs at least 2 rows, got " + std::to_string(values.rows()));
  if (values.cols() < 1) throw ParameterError("data needs at least 1 column");
  if (!values.allFinite()) throw ParameterError("data contains non-finite entries");
  if (static_cast<Index>(column_names.size()) != values.cols())
    throw ParameterError("expected " + std::to_string(values.cols()) + " column names, got " +
                         std::to_string(column_names.size()));
  if (intrinsic) {
    if (intrinsic->rows() != values.rows())
      throw ParameterError("intrinsic block has " + std::to_string(intrinsic->rows()) + " rows, data has " +
                           std::to_string(values.rows()));
    if (static_cast<Index>(intrinsic_names.size()) != intrinsic->cols())
      throw ParameterError("intrinsic names do not match intrinsic columns");
  }
}

DataMatrix make_data_matrix(Eigen::MatrixXd values, std::vector<std::string> names) {
  DataMatrix data;
  if (names.empty()) {
    for (Index j = 0; j < values.cols(); ++j) names.push_back("x" + std::to_string(j));
  }
  data.values = std::move(values);
  data.column_names = std::move(names);
  return data;
}

}  // namespace dmap
