#pragma once

#include "dmap/data_matrix.hpp"
#include "dmap/spectral.hpp"

namespace dmap {

struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;          ///< p x k, orthonormal columns
  Eigen::VectorXd explained_variance;  ///< all p covariance eigenvalues, descending
  double total_variance = 0.0;

  Index k() const { return components.cols(); }
};

/// Eigendecomposition of the divide-by-n covariance of the centered data.
/// Component signs make the largest-magnitude loading positive.
PcaModel pca_fit(const DataMatrix& data, Index k);

Embedding pca_transform(const PcaModel& model, const DataMatrix& data);
Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& values);

/// Lifts k-dimensional scores back into data space.
DataMatrix pca_inverse(const PcaModel& model, const Eigen::MatrixXd& scores);

/// Residual-variance ratio: sum_{i > k} explained_variance_i / total_variance.
double pca_reconstruction_error(const PcaModel& model, Index k);

}  // namespace dmap
