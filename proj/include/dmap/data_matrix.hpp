#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dmap {

using Index = Eigen::Index;

/// n observations of p variables. Synthetic generators also attach the
/// intrinsic coordinates they sampled (e.g. roll angle and height).
struct DataMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> column_names;
  std::optional<Eigen::MatrixXd> intrinsic;
  std::vector<std::string> intrinsic_names;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }

  /// Throws ParameterError unless n >= 2, p >= 1, every entry is finite and
  /// names/intrinsic blocks have consistent shapes.
  void validate() const;
};

/// Wraps a raw matrix, naming the columns x0, x1, ... when no names are given.
DataMatrix make_data_matrix(Eigen::MatrixXd values, std::vector<std::string> names = {});

}  // namespace dmap
