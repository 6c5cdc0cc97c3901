#include "dmap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dmap/errors.hpp"
#include "dmap/lanczos.hpp"

namespace dmap {

namespace {

bool use_dense(const KernelMatrix& Ms, const DecomposeOptions& options) {
  switch (options.solver) {
    case EigenSolverKind::dense: return true;
    case EigenSolverKind::lanczos: return false;
    case EigenSolverKind::automatic: return !Ms.is_sparse() && Ms.size() <= options.dense_limit;
  }
  return true;
}

EigenPairs solve(const KernelMatrix& Ms, Index nev, const DecomposeOptions& options) {
  if (use_dense(Ms, options)) return dense_largest_magnitude(Ms.to_dense(), nev);
  LanczosOptions lopts;
  lopts.tol = options.tol;
  lopts.seed = options.seed;
  auto op = [&Ms](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = Ms.multiply(x); };
  return lanczos_largest_magnitude(op, Ms.size(), nev, lopts);
}

/// Sorts the pairs, converts v to psi/phi and fixes signs.
DiffusionModel assemble(Eigen::VectorXd values, Eigen::MatrixXd v, Eigen::VectorXd residuals,
                        const Eigen::VectorXd& d_tilde, Index keep) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double ma = std::abs(values(a)), mb = std::abs(values(b));
    if (ma != mb) return ma > mb;
    return values(a) > values(b);
  });
  keep = std::min<Index>(keep, values.size());

  DiffusionModel model;
  model.eigenvalues.resize(keep);
  model.v.resize(v.rows(), keep);
  model.residuals.resize(keep);
  for (Index k = 0; k < keep; ++k) {
    model.eigenvalues(k) = values(order[k]);
    model.v.col(k) = v.col(order[k]);
    model.residuals(k) = residuals(order[k]);
  }

  const double trace = d_tilde.sum();
  const Eigen::ArrayXd sqrt_d = d_tilde.array().sqrt();
  model.psi = (std::sqrt(trace) * (model.v.array().colwise() / sqrt_d)).matrix();
  model.phi = ((model.v.array().colwise() * sqrt_d) / std::sqrt(trace)).matrix();

  for (Index k = 0; k < keep; ++k) {
    Index arg = 0;
    model.psi.col(k).cwiseAbs().maxCoeff(&arg);
    if (model.psi(arg, k) < 0.0) {
      model.psi.col(k) *= -1.0;
      model.phi.col(k) *= -1.0;
      model.v.col(k) *= -1.0;
    }
  }
  model.d_tilde = d_tilde;
  return model;
}

void check_k_max(Index k_max, Index n) {
  if (k_max < 0 || k_max > n - 1)
    throw ParameterError("k_max must lie in [0, n - 1] = [0, " + std::to_string(n - 1) + "], got " +
                         std::to_string(k_max));
}

}  // namespace

std::vector<Index> DiffusionModel::negative_components() const {
  std::vector<Index> out;
  for (Index i = 1; i < eigenvalues.size(); ++i)
    if (eigenvalues(i) < 0.0) out.push_back(i);
  return out;
}

Index Embedding::column_of(Index index) const {
  auto it = std::find(component_indices.begin(), component_indices.end(), index);
  if (it == component_indices.end())
    throw ParameterError("component " + std::to_string(index) + " is not part of the embedding");
  return it - component_indices.begin();
}

DiffusionModel decompose(const KernelMatrix& Ms, const Eigen::VectorXd& d_tilde, Index k_max,
                         const DecomposeOptions& options) {
  const Index n = Ms.size();
  check_k_max(k_max, n);
  if (d_tilde.size() != n || !(d_tilde.array() > 0.0).all())
    throw ParameterError("d_tilde must hold n positive row sums");
  EigenPairs pairs = solve(Ms, k_max + 1, options);
  return assemble(std::move(pairs.values), std::move(pairs.vectors), std::move(pairs.residuals), d_tilde, k_max + 1);
}

DiffusionModel decompose_by_component(const GraphMatrices& graph, Index k_max, const DecomposeOptions& options) {
  const Index n = graph.Ms.size();
  check_k_max(k_max, n);
  const Index count = graph.components;
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(count));
  for (Index i = 0; i < n; ++i) members[graph.component_labels[i]].push_back(i);

  std::vector<double> values, residuals;
  std::vector<Eigen::VectorXd> vectors;
  const DenseMatrix full = graph.Ms.to_dense();
  for (const auto& nodes : members) {
    const auto size = static_cast<Index>(nodes.size());
    DenseMatrix block(size, size);
    for (Index a = 0; a < size; ++a)
      for (Index b = 0; b < size; ++b) block(a, b) = full(nodes[a], nodes[b]);
    const Index nev = std::min(k_max + 1, size);
    const EigenPairs pairs = use_dense(graph.Ms, options) || size <= options.dense_limit
                                 ? dense_largest_magnitude(block, nev)
                                 : solve(KernelMatrix(block), nev, options);
    for (Index k = 0; k < nev; ++k) {
      Eigen::VectorXd padded = Eigen::VectorXd::Zero(n);
      for (Index a = 0; a < size; ++a) padded(nodes[a]) = pairs.vectors(a, k);
      vectors.push_back(std::move(padded));
      values.push_back(pairs.values(k));
      residuals.push_back(pairs.residuals(k));
    }
  }

  const auto total = static_cast<Index>(values.size());
  Eigen::MatrixXd v(n, total);
  for (Index k = 0; k < total; ++k) v.col(k) = vectors[k];
  return assemble(Eigen::Map<Eigen::VectorXd>(values.data(), total), std::move(v),
                  Eigen::Map<Eigen::VectorXd>(residuals.data(), total), graph.d_tilde, k_max + 1);
}

Embedding embed(const DiffusionModel& model, int t, const std::vector<Index>& components) {
  if (t < 0) throw ParameterError("diffusion time t must be >= 0");
  Embedding out;
  out.t = t;
  out.source = EmbeddingSource::diffusion;
  out.component_indices = components;
  out.coords.resize(model.psi.rows(), static_cast<Index>(components.size()));
  for (std::size_t j = 0; j < components.size(); ++j) {
    const Index c = components[j];
    if (c == 0) throw ParameterError("component 0 is the constant eigenvector psi_0 and carries no information");
    if (c < 0 || c > model.k_max())
      throw ParameterError("component " + std::to_string(c) + " outside [1, " + std::to_string(model.k_max()) + "]");
    out.coords.col(static_cast<Index>(j)) = std::pow(model.eigenvalues(c), t) * model.psi.col(c);
  }
  return out;
}

std::vector<Index> leading_components(Index k) {
  std::vector<Index> out(static_cast<std::size_t>(std::max<Index>(k, 0)));
  std::iota(out.begin(), out.end(), Index{1});
  return out;
}

double diffusion_distance_sq(const KernelMatrix& M, int t, Index i, Index j, const Eigen::VectorXd& phi0) {
  if (t < 1) throw ParameterError("diffusion distance needs t >= 1");
  const Index n = M.size();
  if (i < 0 || i >= n || j < 0 || j >= n) throw ParameterError("point index out of range");
  // Rows e_i M^t and e_j M^t, propagated as their difference.
  Eigen::VectorXd diff = Eigen::VectorXd::Zero(n);
  diff(i) += 1.0;
  diff(j) -= 1.0;
  for (int s = 0; s < t; ++s) diff = M.left_multiply(diff);
  return (diff.array().square() / phi0.array()).sum();
}

double embedding_distance_sq(const DiffusionModel& model, int t, Index i, Index j, Index k) {
  if (k > model.k_max()) throw ParameterError("k exceeds the retained components");
  double sum = 0.0;
  for (Index l = 1; l <= k; ++l) {
    const double scale = std::pow(model.eigenvalues(l), 2 * t);
    const double d = model.psi(i, l) - model.psi(j, l);
    sum += scale * d * d;
  }
  return sum;
}

Index spectrum_threshold(const DiffusionModel& model, double delta, int t) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  if (t < 1) throw ParameterError("spectrum threshold needs t >= 1");
  if (model.size() < 2) return 0;
  const double first = std::abs(model.eigenvalues(1));
  if (first == 0.0) return 0;
  // (|lambda_l| / |lambda_1|)^t > delta, compared in logs so large t cannot underflow.
  const double log_delta = std::log(delta);
  Index best = 0;
  for (Index l = 1; l < model.size(); ++l) {
    const double ratio = std::abs(model.eigenvalues(l)) / first;
    if (ratio > 0.0 && t * std::log(ratio) > log_delta) best = l;
  }
  return best;
}

SpectrumTable export_spectrum(const DiffusionModel& model, const std::vector<int>& t_values) {
  SpectrumTable table;
  table.t_values = t_values;
  for (Index i = 0; i < model.size(); ++i) {
    table.index.push_back(i);
    table.eigenvalue.push_back(model.eigenvalues(i));
    auto& row = table.powered.emplace_back();
    for (int t : t_values) row.push_back(std::pow(model.eigenvalues(i), t));
  }
  return table;
}

}  // namespace dmap
