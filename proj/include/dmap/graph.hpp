#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "dmap/data_matrix.hpp"

namespace dmap {

using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Gaussian kernel exp(-||xi - xj||^2 / epsilon) with optional k-nearest
/// neighbor truncation and anisotropic exponent alpha.
struct KernelParams {
  double epsilon = 1.0;
  std::optional<Index> n_neighbors;  ///< empty: every point is a neighbor
  double alpha = 0.5;

  /// Throws ParameterError unless epsilon > 0, alpha in [0, 1] and
  /// n_neighbors (when set) lies in [2, n].
  void validate(Index n) const;
};

/// Square n x n matrix in dense or compressed-row storage.
class KernelMatrix {
 public:
  KernelMatrix() = default;
  explicit KernelMatrix(DenseMatrix dense) : storage_(std::move(dense)) {}
  explicit KernelMatrix(SparseMatrix sparse) : storage_(std::move(sparse)) {}

  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(storage_); }
  Index size() const;
  Index nonzeros() const;

  const DenseMatrix& dense() const { return std::get<DenseMatrix>(storage_); }
  const SparseMatrix& sparse() const { return std::get<SparseMatrix>(storage_); }
  DenseMatrix to_dense() const;

  double coeff(Index i, Index j) const;
  Eigen::VectorXd row_sums() const;

  /// diag(left) * A * diag(right), keeping the storage kind.
  KernelMatrix scaled(const Eigen::VectorXd& left, const Eigen::VectorXd& right) const;

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd multiply(const Eigen::MatrixXd& x) const;
  /// Row vector times matrix: returns (x^T A)^T.
  Eigen::VectorXd left_multiply(const Eigen::VectorXd& x) const;

  double max_asymmetry() const;

  /// Calls f(i, j, value) for every stored entry (all entries when dense).
  template <class F>
  void for_each_entry(F&& f) const {
    if (is_sparse()) {
      const auto& s = sparse();
      for (Index i = 0; i < s.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(s, i); it; ++it) f(i, it.col(), it.value());
    } else {
      const auto& d = dense();
      for (Index j = 0; j < d.cols(); ++j)
        for (Index i = 0; i < d.rows(); ++i) f(i, j, d(i, j));
    }
  }

 private:
  std::variant<DenseMatrix, SparseMatrix> storage_;
};

/// Kernel, anisotropic kernel and Markov matrices of one dataset.
struct GraphMatrices {
  KernelMatrix K;
  KernelMatrix L;
  KernelMatrix M;   ///< row-stochastic D~^-1 L
  KernelMatrix Ms;  ///< symmetric D~^-1/2 L D~^-1/2
  Eigen::VectorXd d_tilde;
  Index components = 1;
  std::vector<Index> component_labels;
};

DenseMatrix pairwise_sq_dists(const Eigen::MatrixXd& points);
DenseMatrix pairwise_sq_dists(const DataMatrix& data);

DenseMatrix gaussian_kernel(const DenseMatrix& sq_dists, double epsilon);

/// Keeps K(i, j) when j is among the `n_neighbors` closest points of i
/// (self included, ranked by squared distance, ties by index) or vice versa.
/// Uses compressed-row storage when n_neighbors < n / 4.
KernelMatrix knn_sparsify(const DenseMatrix& kernel, const DenseMatrix& sq_dists, Index n_neighbors);

/// L = D^-alpha K D^-alpha with D the row sums of K.
KernelMatrix anisotropic_normalize(const KernelMatrix& kernel, double alpha);

struct MarkovMatrices {
  KernelMatrix M;
  KernelMatrix Ms;
  Eigen::VectorXd d_tilde;
};

MarkovMatrices markov_normalize(const KernelMatrix& L);

/// Component label per node; edges are nonzero off-diagonal entries.
std::vector<Index> connected_components(const KernelMatrix& matrix);
Index connectivity_check(const KernelMatrix& matrix);

/// Runs kernel -> kNN truncation -> anisotropic -> Markov normalization.
/// Throws DisconnectedGraphError when the graph is disconnected unless
/// `allow_disconnected` is set.
GraphMatrices build_graph(const DataMatrix& data, const KernelParams& params,
                          bool allow_disconnected = false);

}  // namespace dmap
