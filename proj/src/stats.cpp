#include "dmap/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/QR>

#include "dmap/errors.hpp"

namespace dmap::stats {

double mean(const Eigen::VectorXd& x) { return x.mean(); }

double variance(const Eigen::VectorXd& x) {
  const double m = x.mean();
  return (x.array() - m).square().mean();
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("pearson needs two equal-length samples");
  const Eigen::ArrayXd a = x.array() - x.mean();
  const Eigen::ArrayXd b = y.array() - y.mean();
  const double denom = std::sqrt((a * a).sum() * (b * b).sum());
  return denom > 0.0 ? (a * b).sum() / denom : 0.0;
}

Eigen::VectorXd ranks(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return x(a) < x(b); });
  Eigen::VectorXd r(n);
  for (Eigen::Index start = 0; start < n;) {
    Eigen::Index end = start;
    while (end + 1 < n && x(order[end + 1]) == x(order[start])) ++end;
    const double avg = 0.5 * static_cast<double>(start + end) + 1.0;
    for (Eigen::Index k = start; k <= end; ++k) r(order[k]) = avg;
    start = end + 1;
  }
  return r;
}

double spearman(const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return pearson(ranks(x), ranks(y)); }

double r_squared(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(y);
  const double ss_res = (y - design * beta).squaredNorm();
  const double ss_tot = (y.array() - y.mean()).square().sum();
  return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
}

}  // namespace dmap::stats
