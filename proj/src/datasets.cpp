#include "dmap/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "dmap/errors.hpp"
#include "dmap/seeding.hpp"

namespace dmap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRollStart = 1.5 * kPi;
constexpr double kRollEnd = 4.5 * kPi;
constexpr Index kOversampling = 10;

void check_column(const DataMatrix& data, Index column) {
  if (column < 0 || column >= data.cols())
    throw ParameterError("column index " + std::to_string(column) + " out of range [0, " +
                         std::to_string(data.cols()) + ")");
}

double arc_antiderivative(double u) { return 0.5 * (u * std::sqrt(1.0 + u * u) + std::asinh(u)); }

}  // namespace

DataMatrix make_swiss_roll(const SwissRollParams& params) {
  if (params.n < 2) throw ParameterError("swiss roll needs n >= 2");
  if (!(params.noise_sigma >= 0.0)) throw ParameterError("swiss roll noise sigma must be >= 0");
  if (!(params.width > 0.0)) throw ParameterError("swiss roll width must be > 0");

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> angle(kRollStart, kRollEnd);
  std::uniform_real_distribution<double> height(0.0, params.width);
  std::normal_distribution<double> noise(0.0, 1.0);

  DataMatrix data;
  data.values.resize(params.n, 3);
  data.intrinsic = Eigen::MatrixXd(params.n, 2);
  for (Index i = 0; i < params.n; ++i) {
    const double s = angle(rng);
    const double h = height(rng);
    data.values(i, 0) = s * std::cos(s);
    data.values(i, 1) = h;
    data.values(i, 2) = s * std::sin(s);
    (*data.intrinsic)(i, 0) = s;
    (*data.intrinsic)(i, 1) = h;
  }
  // Noise drawn after the manifold samples so sigma does not shift (s, h).
  if (params.noise_sigma > 0.0) {
    for (Index i = 0; i < params.n; ++i)
      for (Index j = 0; j < 3; ++j) data.values(i, j) += params.noise_sigma * noise(rng);
  }
  data.column_names = {"x", "y", "z"};
  data.intrinsic_names = {"s", "h"};
  return data;
}

double swiss_roll_arc_length(double s) { return arc_antiderivative(s) - arc_antiderivative(kRollStart); }

CurveKind parse_curve_kind(std::string_view name) {
  if (name == "line") return CurveKind::line;
  if (name == "arc") return CurveKind::arc;
  if (name == "spiral") return CurveKind::spiral;
  if (name == "circle") return CurveKind::circle;
  throw ParameterError("unknown curve kind '" + std::string(name) + "' (expected line, arc, spiral or circle)");
}

std::string_view to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::line: return "line";
    case CurveKind::arc: return "arc";
    case CurveKind::spiral: return "spiral";
    case CurveKind::circle: return "circle";
  }
  return "unknown";
}

Eigen::Vector2d curve_point(CurveKind kind, double u) {
  switch (kind) {
    case CurveKind::line:
      return {u, 0.5 * u};
    case CurveKind::arc: {
      const double theta = kPi * u;
      return {std::cos(theta), std::sin(theta)};
    }
    case CurveKind::spiral: {
      // Archimedean spiral r = 0.1 theta over two turns; turns stay 0.2 pi apart.
      const double theta = kPi + 4.0 * kPi * u;
      const double r = 0.1 * theta;
      return {r * std::cos(theta), r * std::sin(theta)};
    }
    case CurveKind::circle: {
      const double theta = 2.0 * kPi * u;
      return {std::cos(theta), std::sin(theta)};
    }
  }
  return {0.0, 0.0};
}

DataMatrix make_curve_1d(CurveKind kind, Index n, double noise_sigma, std::uint64_t seed) {
  if (n < 10) throw ParameterError("1-D curves need n >= 10");
  if (!(noise_sigma >= 0.0)) throw ParameterError("noise sigma must be >= 0");
  const bool closed = kind == CurveKind::circle;

  // Inverse CDF of cumulative chord length on a finely sampled polyline.
  const Index m = kOversampling * n;
  std::vector<double> u(static_cast<std::size_t>(m)), cum(static_cast<std::size_t>(m), 0.0);
  Eigen::Vector2d prev = curve_point(kind, 0.0);
  for (Index k = 0; k < m; ++k) {
    u[k] = static_cast<double>(k) / static_cast<double>(m - 1);
    const Eigen::Vector2d p = curve_point(kind, u[k]);
    if (k > 0) cum[k] = cum[k - 1] + (p - prev).norm();
    prev = p;
  }
  const double total = cum.back();

  DataMatrix data;
  data.values.resize(n, 2);
  data.intrinsic = Eigen::MatrixXd(n, 1);
  const double denom = static_cast<double>(closed ? n : n - 1);
  for (Index i = 0; i < n; ++i) {
    const double frac = static_cast<double>(i) / denom;
    const double target = frac * total;
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    Index hi = std::clamp<Index>(it - cum.begin(), 1, m - 1);
    const Index lo = hi - 1;
    const double seg = cum[hi] - cum[lo];
    const double w = seg > 0.0 ? std::clamp((target - cum[lo]) / seg, 0.0, 1.0) : 0.0;
    const double ui = u[lo] + w * (u[hi] - u[lo]);
    data.values.row(i) = curve_point(kind, ui).transpose();
    (*data.intrinsic)(i, 0) = frac;
  }

  if (noise_sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sigma);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < 2; ++j) data.values(i, j) += noise(rng);
  }
  data.column_names = {"x", "y"};
  data.intrinsic_names = {"arclength"};
  return data;
}

DataMatrix standardize(const DataMatrix& data) {
  DataMatrix out = data;
  const double n = static_cast<double>(data.rows());
  for (Index j = 0; j < data.cols(); ++j) {
    auto col = out.values.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / n);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean))))
      throw ParameterError("column '" + data.column_names[j] + "' has zero variance");
    col /= sd;
  }
  return out;
}

DataMatrix minmax_normalize(const DataMatrix& data) {
  DataMatrix out = data;
  for (Index j = 0; j < data.cols(); ++j) {
    auto col = out.values.col(j);
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    if (!(hi > lo)) throw ParameterError("column '" + data.column_names[j] + "' is constant");
    col = (col.array() - lo) / (hi - lo);
  }
  return out;
}

DataMatrix scale_column(const DataMatrix& data, Index column, double factor) {
  check_column(data, column);
  DataMatrix out = data;
  out.values.col(column) *= factor;
  return out;
}

DataMatrix duplicate_column(const DataMatrix& data, Index column, Index copies, double noise_sigma,
                            std::uint64_t seed) {
  check_column(data, column);
  if (copies < 1) throw ParameterError("duplicate_column needs copies >= 1");
  if (!(noise_sigma >= 0.0)) throw ParameterError("noise sigma must be >= 0");

  DataMatrix out = data;
  const Index p = data.cols();
  out.values.conservativeResize(Eigen::NoChange, p + copies);
  for (Index c = 0; c < copies; ++c) {
    std::mt19937_64 rng(derive_seed(seed, {static_cast<std::int64_t>(c)}));
    std::normal_distribution<double> noise(0.0, 1.0);
    auto dst = out.values.col(p + c);
    dst = data.values.col(column);
    if (noise_sigma > 0.0)
      for (Index i = 0; i < dst.size(); ++i) dst(i) += noise_sigma * noise(rng);
    out.column_names.push_back(data.column_names[column] + "_dup" + std::to_string(c + 1));
  }
  return out;
}

DataMatrix discretize_column(const DataMatrix& data, Index column, const std::vector<double>& levels) {
  check_column(data, column);
  if (levels.empty()) throw ParameterError("discretize_column needs at least one level");
  if (!std::is_sorted(levels.begin(), levels.end())) throw ParameterError("discretization levels must be sorted");

  DataMatrix out = data;
  for (Index i = 0; i < data.rows(); ++i) {
    const double v = data.values(i, column);
    auto it = std::lower_bound(levels.begin(), levels.end(), v);
    double snapped;
    if (it == levels.begin()) {
      snapped = *it;
    } else if (it == levels.end()) {
      snapped = levels.back();
    } else {
      const double upper = *it;
      const double lower = *(it - 1);
      snapped = (v - lower) <= (upper - v) ? lower : upper;
    }
    out.values(i, column) = snapped;
  }
  return out;
}

}  // namespace dmap
