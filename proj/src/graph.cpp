#include "dmap/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dmap/errors.hpp"

namespace dmap {

namespace {

std::vector<std::size_t> zero_rows(const Eigen::VectorXd& sums) {
  std::vector<std::size_t> rows;
  for (Index i = 0; i < sums.size(); ++i)
    if (!(sums(i) > 0.0)) rows.push_back(static_cast<std::size_t>(i));
  return rows;
}

[[noreturn]] void throw_isolated(std::vector<std::size_t> rows) {
  std::string msg = "isolated points (zero kernel row):";
  const std::size_t shown = std::min<std::size_t>(rows.size(), 20);
  for (std::size_t k = 0; k < shown; ++k) msg += " " + std::to_string(rows[k]);
  if (rows.size() > shown) msg += " ...";
  throw IsolatedPointError(msg, std::move(rows));
}

struct DisjointSets {
  std::vector<Index> parent;
  explicit DisjointSets(Index n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), Index{0});
  }
  Index find(Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

void KernelParams::validate(Index n) const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ParameterError("epsilon must be a finite value > 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0, 1]");
  if (n_neighbors && (*n_neighbors < 2 || *n_neighbors > n))
    throw ParameterError("n_neighbors must lie in [2, " + std::to_string(n) + "], got " +
                         std::to_string(*n_neighbors));
}

Index KernelMatrix::size() const { return is_sparse() ? sparse().rows() : dense().rows(); }

Index KernelMatrix::nonzeros() const {
  if (is_sparse()) return sparse().nonZeros();
  return (dense().array() != 0.0).count();
}

DenseMatrix KernelMatrix::to_dense() const { return is_sparse() ? DenseMatrix(sparse()) : dense(); }

double KernelMatrix::coeff(Index i, Index j) const { return is_sparse() ? sparse().coeff(i, j) : dense()(i, j); }

Eigen::VectorXd KernelMatrix::row_sums() const {
  if (is_sparse()) {
    const auto& s = sparse();
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(s.rows());
    for (Index i = 0; i < s.outerSize(); ++i)
      for (SparseMatrix::InnerIterator it(s, i); it; ++it) sums(i) += it.value();
    return sums;
  }
  return dense().rowwise().sum();
}

KernelMatrix KernelMatrix::scaled(const Eigen::VectorXd& left, const Eigen::VectorXd& right) const {
  if (is_sparse()) {
    SparseMatrix s = sparse();
    for (Index i = 0; i < s.outerSize(); ++i)
      for (SparseMatrix::InnerIterator it(s, i); it; ++it) it.valueRef() *= left(i) * right(it.col());
    return KernelMatrix(std::move(s));
  }
  DenseMatrix d = dense();
  for (Index j = 0; j < d.cols(); ++j)
    for (Index i = 0; i < d.rows(); ++i) d(i, j) *= left(i) * right(j);
  return KernelMatrix(std::move(d));
}

Eigen::VectorXd KernelMatrix::multiply(const Eigen::VectorXd& x) const {
  if (is_sparse()) return sparse() * x;
  return dense() * x;
}

Eigen::MatrixXd KernelMatrix::multiply(const Eigen::MatrixXd& x) const {
  if (is_sparse()) return sparse() * x;
  return dense() * x;
}

Eigen::VectorXd KernelMatrix::left_multiply(const Eigen::VectorXd& x) const {
  if (is_sparse()) return sparse().transpose() * x;
  return dense().transpose() * x;
}

double KernelMatrix::max_asymmetry() const {
  if (is_sparse()) {
    const SparseMatrix t = sparse().transpose();
    const SparseMatrix diff = sparse() - t;
    double worst = 0.0;
    for (Index i = 0; i < diff.outerSize(); ++i)
      for (SparseMatrix::InnerIterator it(diff, i); it; ++it) worst = std::max(worst, std::abs(it.value()));
    return worst;
  }
  return (dense() - dense().transpose()).cwiseAbs().maxCoeff();
}

DenseMatrix pairwise_sq_dists(const Eigen::MatrixXd& points) {
  if (!points.allFinite()) throw ParameterError("pairwise distances need finite input");
  const Index n = points.rows();
  const Eigen::MatrixXd cols = points.transpose();
  DenseMatrix d2 = DenseMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const double v = (cols.col(i) - cols.col(j)).squaredNorm();
      d2(i, j) = v;
      d2(j, i) = v;
    }
  }
  return d2;
}

DenseMatrix pairwise_sq_dists(const DataMatrix& data) { return pairwise_sq_dists(data.values); }

DenseMatrix gaussian_kernel(const DenseMatrix& sq_dists, double epsilon) {
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be > 0");
  // std::exp rather than Eigen's vectorized exp: the latter clamps its
  // argument, so far-apart pairs would never underflow to an exact zero and
  // disconnected graphs would go unnoticed.
  return sq_dists.unaryExpr([epsilon](double d) { return std::exp(-d / epsilon); });
}

KernelMatrix knn_sparsify(const DenseMatrix& kernel, const DenseMatrix& sq_dists, Index n_neighbors) {
  const Index n = kernel.rows();
  if (n_neighbors < 1 || n_neighbors > n)
    throw ParameterError("n_neighbors must lie in [1, " + std::to_string(n) + "], got " +
                         std::to_string(n_neighbors));
  if (n_neighbors == n) return KernelMatrix(kernel);

  // Self is always kept; the remaining n_neighbors - 1 slots go to the nearest others.
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(2 * n * n_neighbors));
  std::vector<Index> others(static_cast<std::size_t>(n - 1));
  const auto keep = static_cast<std::ptrdiff_t>(n_neighbors - 1);
  for (Index i = 0; i < n; ++i) {
    entries.emplace_back(i, i, kernel(i, i));
    if (keep == 0) continue;
    Index k = 0;
    for (Index j = 0; j < n; ++j)
      if (j != i) others[k++] = j;
    auto closer = [&](Index a, Index b) {
      const double da = sq_dists(i, a), db = sq_dists(i, b);
      return da < db || (da == db && a < b);
    };
    std::nth_element(others.begin(), others.begin() + (keep - 1), others.end(), closer);
    for (std::ptrdiff_t r = 0; r < keep; ++r) {
      const Index j = others[r];
      entries.emplace_back(i, j, kernel(i, j));
      entries.emplace_back(j, i, kernel(j, i));
    }
  }

  SparseMatrix s(n, n);
  s.setFromTriplets(entries.begin(), entries.end(), [](double a, double) { return a; });
  s.makeCompressed();
  if (4 * n_neighbors < n) return KernelMatrix(std::move(s));
  return KernelMatrix(DenseMatrix(s));
}

KernelMatrix anisotropic_normalize(const KernelMatrix& kernel, double alpha) {
  const Eigen::VectorXd d = kernel.row_sums();
  if (auto rows = zero_rows(d); !rows.empty()) throw_isolated(std::move(rows));
  const Eigen::VectorXd a = d.array().pow(-alpha).matrix();
  return kernel.scaled(a, a);
}

MarkovMatrices markov_normalize(const KernelMatrix& L) {
  MarkovMatrices out;
  out.d_tilde = L.row_sums();
  if (auto rows = zero_rows(out.d_tilde); !rows.empty()) throw_isolated(std::move(rows));
  const Eigen::VectorXd inv = out.d_tilde.cwiseInverse();
  const Eigen::VectorXd inv_sqrt = out.d_tilde.cwiseSqrt().cwiseInverse();
  out.M = L.scaled(inv, Eigen::VectorXd::Ones(L.size()));
  out.Ms = L.scaled(inv_sqrt, inv_sqrt);
  return out;
}

std::vector<Index> connected_components(const KernelMatrix& matrix) {
  const Index n = matrix.size();
  DisjointSets sets(n);
  matrix.for_each_entry([&](Index i, Index j, double v) {
    if (i != j && v != 0.0) sets.unite(i, j);
  });
  // Labels numbered by first appearance so they are stable.
  std::vector<Index> label(static_cast<std::size_t>(n), -1), root_label(static_cast<std::size_t>(n), -1);
  Index next = 0;
  for (Index i = 0; i < n; ++i) {
    const Index r = sets.find(i);
    if (root_label[r] < 0) root_label[r] = next++;
    label[i] = root_label[r];
  }
  return label;
}

Index connectivity_check(const KernelMatrix& matrix) {
  const auto labels = connected_components(matrix);
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

GraphMatrices build_graph(const DataMatrix& data, const KernelParams& params, bool allow_disconnected) {
  data.validate();
  params.validate(data.rows());
  const Index n = data.rows();

  const DenseMatrix d2 = pairwise_sq_dists(data);
  DenseMatrix k = gaussian_kernel(d2, params.epsilon);

  GraphMatrices g;
  if (params.n_neighbors && *params.n_neighbors < n)
    g.K = knn_sparsify(k, d2, *params.n_neighbors);
  else
    g.K = KernelMatrix(std::move(k));

  g.component_labels = connected_components(g.K);
  g.components = *std::max_element(g.component_labels.begin(), g.component_labels.end()) + 1;
  if (g.components > 1 && !allow_disconnected)
    throw DisconnectedGraphError("neighborhood graph has " + std::to_string(g.components) +
                                     " connected components; increase epsilon or n_neighbors, "
                                     "or allow disconnected graphs",
                                 static_cast<std::size_t>(g.components));

  g.L = anisotropic_normalize(g.K, params.alpha);
  auto markov = markov_normalize(g.L);
  g.M = std::move(markov.M);
  g.Ms = std::move(markov.Ms);
  g.d_tilde = std::move(markov.d_tilde);
  return g;
}

}  // namespace dmap
