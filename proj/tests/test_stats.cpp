#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dmap/stats.hpp"
#include "oracles.hpp"

using namespace dmap;

TEST_CASE("moments and correlations") {
  const Eigen::Vector4d x(1, 2, 3, 4), y(2, 4, 6, 8.5);
  CHECK(stats::mean(x) == 2.5);
  CHECK(stats::variance(x) == doctest::Approx(1.25));
  CHECK(stats::pearson(x, 2 * x) == doctest::Approx(1.0));
  CHECK(stats::pearson(x, -x) == doctest::Approx(-1.0));
  CHECK(stats::spearman(x, y) == doctest::Approx(1.0));
  const Eigen::Vector4d cubed = x.array().cube();
  CHECK(stats::spearman(x, cubed) == doctest::Approx(1.0));
  CHECK(stats::pearson(x, cubed) < 1.0);
}

TEST_CASE("ranks share ties") {
  const Eigen::Vector4d x(10, 20, 20, 5);
  const Eigen::VectorXd r = stats::ranks(x);
  CHECK(r(0) == 2.0);
  CHECK(r(1) == 3.5);
  CHECK(r(2) == 3.5);
  CHECK(r(3) == 1.0);
}

TEST_CASE("r squared of least squares fits") {
  const Eigen::MatrixXd u = oracle::uniform_matrix(200, 1, 3);
  Eigen::MatrixXd design(200, 2);
  design.col(0).setOnes();
  design.col(1) = u.col(0);
  const Eigen::VectorXd exact = 3.0 + 2.0 * u.col(0).array();
  CHECK(stats::r_squared(design, exact) == doctest::Approx(1.0));
  const Eigen::VectorXd noise = oracle::gaussian_matrix(200, 1, 4).col(0);
  CHECK(stats::r_squared(design, noise) < 0.1);
}
