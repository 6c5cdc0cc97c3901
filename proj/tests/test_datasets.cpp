#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "dmap/csv.hpp"
#include "dmap/datasets.hpp"
#include "dmap/errors.hpp"
#include "dmap/graph.hpp"
#include "oracles.hpp"

using namespace dmap;
using std::numbers::pi;

namespace {

double population_sd(const Eigen::VectorXd& v) {
  return std::sqrt((v.array() - v.mean()).square().mean());
}

DataMatrix column(std::vector<double> values) {
  Eigen::MatrixXd m(static_cast<Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Index>(i), 0) = values[i];
  return make_data_matrix(m);
}

}  // namespace

TEST_CASE("swiss roll with default parameters") {
  const DataMatrix roll = make_swiss_roll({});
  REQUIRE(roll.rows() == 3000);
  REQUIRE(roll.cols() == 3);
  REQUIRE(roll.intrinsic);
  CHECK(roll.intrinsic->cols() == 2);
  CHECK(roll.column_names == std::vector<std::string>{"x", "y", "z"});
  const double slack = 3 * 0.2;
  CHECK(roll.intrinsic->col(0).minCoeff() >= 1.5 * pi);
  CHECK(roll.intrinsic->col(0).maxCoeff() <= 4.5 * pi);
  CHECK(roll.intrinsic->col(1).minCoeff() >= 0.0);
  CHECK(roll.intrinsic->col(1).maxCoeff() <= 21.0);
  // The width coordinate stays within the noise band around [0, 21].
  CHECK(roll.values.col(1).minCoeff() >= -slack - 1.0);
  CHECK(roll.values.col(1).maxCoeff() <= 21.0 + slack + 1.0);
  const Eigen::VectorXd noise_y = roll.values.col(1) - roll.intrinsic->col(1);
  CHECK(population_sd(noise_y) == doctest::Approx(0.2).epsilon(0.05));
}

TEST_CASE("noiseless swiss roll lies on the surface") {
  const DataMatrix roll = make_swiss_roll({2, 0.0, 1.0, 0});
  for (Index i = 0; i < roll.rows(); ++i) {
    const double s = (*roll.intrinsic)(i, 0);
    const double x = roll.values(i, 0), z = roll.values(i, 2);
    CHECK(x * x + z * z == doctest::Approx(s * s).epsilon(1e-12));
    CHECK(roll.values(i, 1) == (*roll.intrinsic)(i, 1));
  }
  const DataMatrix big = make_swiss_roll({200, 0.0, 21.0, 9});
  for (Index i = 0; i < big.rows(); ++i) {
    const double s = (*big.intrinsic)(i, 0);
    CHECK(std::hypot(big.values(i, 0), big.values(i, 2)) == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("arc length of the roll matches quadrature") {
  const DataMatrix roll = make_swiss_roll({500, 0.01, 21.0, 7});
  const double s_max = roll.intrinsic->col(0).maxCoeff();
  const double quad = oracle::simpson([](double u) { return std::sqrt(1 + u * u); }, 1.5 * pi, s_max, 2000);
  CHECK(swiss_roll_arc_length(s_max) == doctest::Approx(quad).epsilon(0.01));
  CHECK(swiss_roll_arc_length(1.5 * pi) == doctest::Approx(0.0));
  const double full = oracle::simpson([](double u) { return std::sqrt(1 + u * u); }, 1.5 * pi, 4.5 * pi, 2000);
  CHECK(swiss_roll_arc_length(4.5 * pi) == doctest::Approx(full).epsilon(1e-10));
  CHECK(full > 85.0);
  CHECK(full < 95.0);
}

TEST_CASE("swiss roll is deterministic and validates parameters") {
  const DataMatrix a = make_swiss_roll({300, 0.2, 21.0, 5});
  const DataMatrix b = make_swiss_roll({300, 0.2, 21.0, 5});
  CHECK(a.values == b.values);
  CHECK(*a.intrinsic == *b.intrinsic);
  const DataMatrix c = make_swiss_roll({300, 0.2, 21.0, 6});
  CHECK(a.values != c.values);
  CHECK_THROWS_AS(make_swiss_roll({1, 0.2, 21.0, 0}), ParameterError);
  CHECK_THROWS_AS(make_swiss_roll({10, -0.1, 21.0, 0}), ParameterError);
  CHECK_THROWS_AS(make_swiss_roll({10, 0.1, 0.0, 0}), ParameterError);
}

TEST_CASE("line curve has rank one") {
  const DataMatrix line = make_curve_1d(CurveKind::line, 300, 0.0, 1);
  const Eigen::VectorXd sv = oracle::svd_variances(line.values);
  CHECK(sv(1) < 1e-20);
  CHECK(sv(0) > 0.01);
  REQUIRE(line.intrinsic);
  CHECK((*line.intrinsic)(0, 0) == 0.0);
  CHECK((*line.intrinsic)(299, 0) == doctest::Approx(1.0));
}

TEST_CASE("circle points sit at constant radius") {
  const DataMatrix circle = make_curve_1d(CurveKind::circle, 300, 0.0, 1);
  const Eigen::RowVectorXd centroid = circle.values.colwise().mean();
  const Eigen::VectorXd r = (circle.values.rowwise() - centroid).rowwise().norm();
  CHECK(r.maxCoeff() - r.minCoeff() < 1e-9);
}

TEST_CASE("spiral is sampled uniformly in arc length") {
  const DataMatrix clean = make_curve_1d(CurveKind::spiral, 300, 0.0, 3);
  const std::vector<double> gaps = oracle::chord_gaps(clean.values);
  double mean = 0.0;
  for (double g : gaps) mean += g;
  mean /= static_cast<double>(gaps.size());
  for (double g : gaps) CHECK(std::abs(g - mean) < 0.05 * mean);

  // The noisy version shares positions; only the added noise differs.
  const DataMatrix noisy = make_curve_1d(CurveKind::spiral, 300, 0.01, 3);
  CHECK(*noisy.intrinsic == *clean.intrinsic);
  const Eigen::MatrixXd noise = noisy.values - clean.values;
  const double sd = std::sqrt(noise.squaredNorm() / static_cast<double>(noise.size()));
  CHECK(sd == doctest::Approx(0.01).epsilon(0.15));
}

TEST_CASE("curve kinds and validation") {
  CHECK(parse_curve_kind("arc") == CurveKind::arc);
  CHECK(to_string(CurveKind::spiral) == "spiral");
  CHECK_THROWS_AS(parse_curve_kind("helix"), ParameterError);
  CHECK_THROWS_AS(make_curve_1d(CurveKind::line, 5, 0.0, 1), ParameterError);
  const DataMatrix arc = make_curve_1d(CurveKind::arc, 50, 0.0, 1);
  CHECK(arc.cols() == 2);
  for (Index i = 0; i < arc.rows(); ++i) CHECK(arc.values.row(i).norm() == doctest::Approx(1.0));
}

TEST_CASE("standardize") {
  const DataMatrix z = standardize(column({1, 2, 3}));
  CHECK(z.values(0, 0) == doctest::Approx(-1.224744871391589));
  CHECK(z.values(1, 0) == doctest::Approx(0.0));
  CHECK(z.values(2, 0) == doctest::Approx(1.224744871391589));

  const DataMatrix random = make_data_matrix(oracle::uniform_matrix(100, 4, 11) * 7.0);
  const DataMatrix s = standardize(random);
  for (Index j = 0; j < 4; ++j) {
    CHECK(std::abs(s.values.col(j).mean()) < 1e-10);
    CHECK(std::abs(population_sd(s.values.col(j)) - 1.0) < 1e-10);
  }
  CHECK((standardize(s).values - s.values).cwiseAbs().maxCoeff() < 1e-12);

  DataMatrix constant = make_data_matrix(Eigen::MatrixXd::Ones(5, 2), {"a", "flat"});
  constant.values.col(0) << 1, 2, 3, 4, 5;
  try {
    standardize(constant);
    FAIL("expected an error");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("flat") != std::string::npos);
  }
}

TEST_CASE("minmax normalize") {
  const DataMatrix m = minmax_normalize(column({0, 5, 10}));
  CHECK(m.values(0, 0) == 0.0);
  CHECK(m.values(1, 0) == 0.5);
  CHECK(m.values(2, 0) == 1.0);
  const DataMatrix unit = column({0, 0.25, 1});
  CHECK(minmax_normalize(unit).values == unit.values);
  const DataMatrix r = minmax_normalize(make_data_matrix(oracle::gaussian_matrix(50, 3, 4)));
  for (Index j = 0; j < 3; ++j) {
    CHECK(r.values.col(j).minCoeff() == 0.0);
    CHECK(r.values.col(j).maxCoeff() == 1.0);
  }
  CHECK_THROWS_AS(minmax_normalize(column({2, 2, 2})), ParameterError);
}

TEST_CASE("scale column") {
  const DataMatrix roll = make_swiss_roll({200, 0.2, 21.0, 3});
  CHECK(scale_column(roll, 1, 1.0).values == roll.values);
  const DataMatrix wide = scale_column(roll, 1, 2.0);
  const double before = roll.values.col(1).maxCoeff() - roll.values.col(1).minCoeff();
  const double after = wide.values.col(1).maxCoeff() - wide.values.col(1).minCoeff();
  CHECK(after == doctest::Approx(2 * before));
  CHECK(wide.values.col(0) == roll.values.col(0));
  CHECK(wide.values.col(2) == roll.values.col(2));
  CHECK(*wide.intrinsic == *roll.intrinsic);
  CHECK_THROWS_AS(scale_column(roll, 3, 2.0), ParameterError);
  CHECK_THROWS_AS(scale_column(roll, -1, 2.0), ParameterError);
}

TEST_CASE("duplicating a column equals scaling it for distances") {
  const DataMatrix roll = make_swiss_roll({60, 0.2, 21.0, 8});
  for (Index m : {1, 3, 8}) {
    const Eigen::MatrixXd dup = pairwise_sq_dists(duplicate_column(roll, 1, m, 0.0, 1));
    const Eigen::MatrixXd scaled =
        pairwise_sq_dists(scale_column(roll, 1, std::sqrt(static_cast<double>(m + 1))));
    CHECK(((dup - scaled).array().abs() / (1.0 + dup.array())).maxCoeff() < 1e-12);
  }
}

TEST_CASE("duplicate column") {
  const DataMatrix roll = make_swiss_roll({500, 0.2, 21.0, 3});
  const DataMatrix one = duplicate_column(roll, 1, 1, 0.0, 1);
  REQUIRE(one.cols() == 4);
  CHECK(one.values.col(3) == roll.values.col(1));
  CHECK(one.column_names[3] == "y_dup1");

  const DataMatrix eight = duplicate_column(roll, 1, 8, 21.0 / 10, 2);
  CHECK(eight.cols() == 11);
  CHECK(eight.values.col(3) != eight.values.col(4));

  const double range = roll.values.col(1).maxCoeff() - roll.values.col(1).minCoeff();
  const DataMatrix close = duplicate_column(roll, 1, 2, range / 100, 5);
  for (Index c : {3, 4}) {
    const Eigen::VectorXd a = close.values.col(1), b = close.values.col(c);
    const double corr = ((a.array() - a.mean()) * (b.array() - b.mean())).mean() / (population_sd(a) * population_sd(b));
    CHECK(corr > 0.99);
  }
  CHECK_THROWS_AS(duplicate_column(roll, 1, 0, 0.0, 1), ParameterError);
  CHECK_THROWS_AS(duplicate_column(roll, 7, 1, 0.0, 1), ParameterError);
}

TEST_CASE("discretize column") {
  CHECK(discretize_column(column({0.2, 0.8}), 0, {0, 1}).values == column({0, 1}).values);
  CHECK(discretize_column(column({0.2, 0.8, -3}), 0, {2.5}).values == column({2.5, 2.5, 2.5}).values);
  CHECK(discretize_column(column({0.5}), 0, {0, 1}).values(0, 0) == 0.0);
  CHECK_THROWS_AS(discretize_column(column({0.5}), 0, {}), ParameterError);

  const Index n = 3000;
  const DataMatrix u = make_data_matrix(oracle::uniform_matrix(n, 1, 17));
  const DataMatrix d = discretize_column(u, 0, {0, 0.5, 1});
  const double expected[] = {0.25, 0.5, 0.25};
  const double levels[] = {0, 0.5, 1};
  for (int l = 0; l < 3; ++l) {
    const double count = (d.values.col(0).array() == levels[l]).cast<double>().sum();
    const double sigma = std::sqrt(n * expected[l] * (1 - expected[l]));
    CHECK(std::abs(count - n * expected[l]) < 3 * sigma);
  }
}

TEST_CASE("csv round trip is exact") {
  const DataMatrix roll = make_swiss_roll({50, 0.2, 21.0, 1});
  const auto path = std::filesystem::temp_directory_path() / "dmap_test_roundtrip.csv";
  write_data_matrix_csv(roll, path);
  const DataMatrix back = read_data_matrix_csv(path);
  CHECK(back.values == roll.values);
  REQUIRE(back.intrinsic);
  CHECK(*back.intrinsic == *roll.intrinsic);
  CHECK(back.column_names == roll.column_names);
  CHECK(back.intrinsic_names == roll.intrinsic_names);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_data_matrix_csv(path), IoError);
  CHECK(format_double(0.1) == "0.10000000000000001");
}
