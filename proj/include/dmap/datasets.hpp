#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "dmap/data_matrix.hpp"

namespace dmap {

/// Swiss roll generator parameters. The roll angle s is uniform on
/// [3pi/2, 9pi/2], the height h uniform on [0, width], and every output
/// coordinate receives independent N(0, noise_sigma^2) noise.
struct SwissRollParams {
  Index n = 3000;
  double noise_sigma = 0.2;
  double width = 21.0;
  std::uint64_t seed = 42;
};

/// Columns (x, y, z) = (s cos s, h, s sin s) + noise; intrinsic columns (s, h).
DataMatrix make_swiss_roll(const SwissRollParams& params);

/// Arc length of the roll's spiral cross-section from s = 3pi/2 to s
/// (closed form of the integral of sqrt(1 + u^2)).
double swiss_roll_arc_length(double s);

enum class CurveKind { line, arc, spiral, circle };

CurveKind parse_curve_kind(std::string_view name);
std::string_view to_string(CurveKind kind);

/// Planar curve sampled uniformly in arc length. Open curves place the first
/// and last point on the endpoints; the circle spaces n points around the
/// full loop. Intrinsic column `arclength` holds the normalized arc-length
/// position in [0, 1].
DataMatrix make_curve_1d(CurveKind kind, Index n, double noise_sigma, std::uint64_t seed);

/// Analytic point of the named curve at parameter u in [0, 1].
Eigen::Vector2d curve_point(CurveKind kind, double u);

/// Zero mean, unit population standard deviation per column.
DataMatrix standardize(const DataMatrix& data);

/// Affine map of each column onto [0, 1].
DataMatrix minmax_normalize(const DataMatrix& data);

DataMatrix scale_column(const DataMatrix& data, Index column, double factor);

/// Appends `copies` noisy replicas of `column`. Copy c draws its noise from
/// a stream seeded by (seed, c), so copies are mutually independent.
DataMatrix duplicate_column(const DataMatrix& data, Index column, Index copies,
                            double noise_sigma, std::uint64_t seed);

/// Snaps every entry of `column` to the nearest of `levels` (ties go to the
/// lower level). `levels` must be non-empty and sorted ascending.
DataMatrix discretize_column(const DataMatrix& data, Index column, const std::vector<double>& levels);

}  // namespace dmap
