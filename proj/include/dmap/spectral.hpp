#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "dmap/graph.hpp"

namespace dmap {

enum class EigenSolverKind { automatic, dense, lanczos };

struct DecomposeOptions {
  EigenSolverKind solver = EigenSolverKind::automatic;
  Index dense_limit = 2000;  ///< automatic: dense storage up to this n, Lanczos above
  double tol = 1e-10;
  std::uint64_t seed = 1;
};

/// Spectrum of the Markov matrix. Column i of psi / phi is the right / left
/// eigenvector for eigenvalues(i); eigenvalues are sorted by descending |value|
/// (ties: larger signed value, then solver order). Column 0 is the trivial
/// pair lambda = 1, psi = 1.
struct DiffusionModel {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd v;    ///< orthonormal eigenvectors of Ms
  Eigen::MatrixXd psi;  ///< right eigenvectors of M
  Eigen::MatrixXd phi;  ///< left eigenvectors of M; phi.col(0) sums to 1
  Eigen::VectorXd d_tilde;
  KernelParams params;
  Eigen::VectorXd residuals;  ///< ||Ms v - lambda v|| per pair

  Index size() const { return eigenvalues.size(); }
  Index k_max() const { return eigenvalues.size() - 1; }
  /// Indices i >= 1 of retained eigenvalues that are negative.
  std::vector<Index> negative_components() const;
};

enum class EmbeddingSource { diffusion, pca };

struct Embedding {
  Eigen::MatrixXd coords;
  std::vector<Index> component_indices;  ///< 1-based component numbers
  int t = 1;
  EmbeddingSource source = EmbeddingSource::diffusion;

  /// Column holding component `index`; throws ParameterError if absent.
  Index column_of(Index index) const;
};

/// Top k_max + 1 eigenpairs of Ms turned into left/right eigenvectors of M:
///   psi_i = sqrt(tr D~) v_i / sqrt(d~),  phi_i = v_i sqrt(d~) / sqrt(tr D~).
/// Signs are fixed so the largest-magnitude entry of every psi_i is positive.
DiffusionModel decompose(const KernelMatrix& Ms, const Eigen::VectorXd& d_tilde, Index k_max,
                         const DecomposeOptions& options = {});

/// Decomposes each connected component on its own and merges the spectra.
/// Used when disconnected graphs are explicitly allowed.
DiffusionModel decompose_by_component(const GraphMatrices& graph, Index k_max,
                                      const DecomposeOptions& options = {});

/// Column j = lambda_{c_j}^t psi_{c_j}. Component 0 is rejected.
Embedding embed(const DiffusionModel& model, int t, const std::vector<Index>& components);

/// Components 1..k.
std::vector<Index> leading_components(Index k);

/// Squared diffusion distance sum_y (p_t(y|i) - p_t(y|j))^2 / phi0(y), from
/// explicit t-step transition distributions.
double diffusion_distance_sq(const KernelMatrix& M, int t, Index i, Index j, const Eigen::VectorXd& phi0);

/// sum_{l=1..k} lambda_l^{2t} (psi_l(i) - psi_l(j))^2.
double embedding_distance_sq(const DiffusionModel& model, int t, Index i, Index j, Index k);

/// Largest l with |lambda_l|^t > delta |lambda_1|^t.
Index spectrum_threshold(const DiffusionModel& model, double delta, int t);

struct SpectrumTable {
  std::vector<int> t_values;
  std::vector<Index> index;
  std::vector<double> eigenvalue;
  std::vector<std::vector<double>> powered;  ///< powered[row][k] = lambda^t_values[k]
};

SpectrumTable export_spectrum(const DiffusionModel& model, const std::vector<int>& t_values);

}  // namespace dmap
