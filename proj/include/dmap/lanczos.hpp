#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

#include "dmap/data_matrix.hpp"

namespace dmap {

struct EigenPairs {
  Eigen::VectorXd values;   ///< sorted by descending |value|
  Eigen::MatrixXd vectors;  ///< orthonormal columns
  Eigen::VectorXd residuals;
  int restarts = 0;
};

struct LanczosOptions {
  Index krylov_dim = 0;  ///< 0: max(2 * nev + 1, nev + 32), capped at n
  double tol = 1e-10;    ///< on ||A x - theta x||, relative to the largest |theta|
  int max_restarts = 1000;
  std::uint64_t seed = 1;
};

/// y = A x for a symmetric operator of dimension n.
using SymmetricOperator = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

/// Thick-restart Lanczos (Krylov-Schur for symmetric operators) with full
/// reorthogonalization. Returns the `nev` eigenpairs of largest magnitude.
/// Throws EigensolverError when `max_restarts` is exhausted.
EigenPairs lanczos_largest_magnitude(const SymmetricOperator& op, Index n, Index nev,
                                     const LanczosOptions& options = {});

/// Dense reference path: full symmetric decomposition, same ordering.
EigenPairs dense_largest_magnitude(const Eigen::MatrixXd& a, Index nev);

}  // namespace dmap
