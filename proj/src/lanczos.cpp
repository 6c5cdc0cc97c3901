#include "dmap/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dmap/errors.hpp"

namespace dmap {

namespace {

/// Indices of `values` by descending magnitude, then descending value.
std::vector<Index> magnitude_order(const Eigen::VectorXd& values) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double ma = std::abs(values(a)), mb = std::abs(values(b));
    if (ma != mb) return ma > mb;
    return values(a) > values(b);
  });
  return order;
}

EigenPairs select_pairs(const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors, Index nev) {
  const auto order = magnitude_order(values);
  EigenPairs out;
  out.values.resize(nev);
  out.vectors.resize(vectors.rows(), nev);
  for (Index k = 0; k < nev; ++k) {
    out.values(k) = values(order[k]);
    out.vectors.col(k) = vectors.col(order[k]);
  }
  return out;
}

void check_nev(Index n, Index nev) {
  if (nev < 1 || nev > n)
    throw ParameterError("requested " + std::to_string(nev) + " eigenpairs of a " + std::to_string(n) + "-dim operator");
}

}  // namespace

EigenPairs dense_largest_magnitude(const Eigen::MatrixXd& a, Index nev) {
  check_nev(a.rows(), nev);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw EigensolverError("dense symmetric eigensolver failed", {});
  EigenPairs out = select_pairs(solver.eigenvalues(), solver.eigenvectors(), nev);
  out.residuals = ((a * out.vectors) - out.vectors * out.values.asDiagonal()).colwise().norm().transpose();
  return out;
}

EigenPairs lanczos_largest_magnitude(const SymmetricOperator& op, Index n, Index nev, const LanczosOptions& options) {
  check_nev(n, nev);
  Index m = options.krylov_dim > 0 ? options.krylov_dim : std::max(2 * nev + 1, nev + 32);
  m = std::min(m, n);

  Eigen::VectorXd x(n), y(n);
  if (m >= n || m <= nev) {
    // Krylov space would span everything: assemble the matrix and solve densely.
    Eigen::MatrixXd a(n, n);
    for (Index j = 0; j < n; ++j) {
      x.setZero();
      x(j) = 1.0;
      op(x, y);
      a.col(j) = y;
    }
    return dense_largest_magnitude(0.5 * (a + a.transpose()), nev);
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_vector = [&] {
    Eigen::VectorXd r(n);
    for (Index i = 0; i < n; ++i) r(i) = gauss(rng);
    return r;
  };

  Eigen::MatrixXd V(n, m), AV(n, m);
  Eigen::VectorXd f = random_vector();
  Index j = 0;
  double scale = 0.0;
  const Index keep = std::clamp<Index>(nev + (m - nev) / 2, nev, m - 1);
  Eigen::VectorXd last_residuals;

  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    // Extend the basis to m vectors with twice-repeated Gram-Schmidt.
    while (j < m) {
      double norm_before = f.norm();
      for (int pass = 0; pass < 2; ++pass) f -= V.leftCols(j) * (V.leftCols(j).transpose() * f);
      double norm = f.norm();
      for (int attempt = 0; !(norm > 1e-10 * std::max(norm_before, 1e-300)) && attempt < 5; ++attempt) {
        // Invariant subspace reached: continue from a fresh random direction.
        f = random_vector();
        norm_before = f.norm();
        for (int pass = 0; pass < 2; ++pass) f -= V.leftCols(j) * (V.leftCols(j).transpose() * f);
        norm = f.norm();
      }
      V.col(j) = f / norm;
      x = V.col(j);
      op(x, y);
      AV.col(j) = y;
      f = y;
      ++j;
    }

    Eigen::MatrixXd H = V.transpose() * AV;
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(H);
    const auto order = magnitude_order(small.eigenvalues());

    Eigen::MatrixXd Y(m, keep);
    Eigen::VectorXd theta(keep);
    for (Index k = 0; k < keep; ++k) {
      Y.col(k) = small.eigenvectors().col(order[k]);
      theta(k) = small.eigenvalues()(order[k]);
    }
    scale = std::max(scale, std::abs(theta(0)));
    const Eigen::MatrixXd ritz = V * Y.leftCols(nev);
    const Eigen::MatrixXd residual = AV * Y.leftCols(nev) - ritz * theta.head(nev).asDiagonal();
    last_residuals = residual.colwise().norm().transpose();

    const double threshold = options.tol * std::max(scale, 1e-300);
    if ((last_residuals.array() <= threshold).all()) {
      EigenPairs out;
      out.values = theta.head(nev);
      out.vectors = ritz;
      out.residuals.resize(nev);
      for (Index k = 0; k < nev; ++k) {
        x = ritz.col(k);
        op(x, y);
        out.residuals(k) = (y - out.values(k) * x).norm();
      }
      out.restarts = restart;
      return out;
    }

    // Thick restart: keep the leading Ritz vectors, continue from the part of
    // A v_m outside the current basis.
    Eigen::VectorXd outward = AV.col(m - 1);
    for (int pass = 0; pass < 2; ++pass) outward -= V * (V.transpose() * outward);
    const Eigen::MatrixXd kept = V * Y;
    V.leftCols(keep) = kept;
    for (Index k = 0; k < keep; ++k) {
      x = V.col(k);
      op(x, y);
      AV.col(k) = y;
    }
    j = keep;
    f = outward;
  }

  throw EigensolverError("Lanczos did not converge after " + std::to_string(options.max_restarts) +
                             " restarts (max residual " + std::to_string(last_residuals.maxCoeff()) + ")",
                         std::vector<double>(last_residuals.data(), last_residuals.data() + last_residuals.size()));
}

}  // namespace dmap
