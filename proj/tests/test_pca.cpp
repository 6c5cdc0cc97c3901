#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dmap/errors.hpp"
#include "dmap/pca.hpp"
#include "oracles.hpp"

using namespace dmap;

namespace {

/// Mean squared reconstruction error per entry, normalized by the mean
/// per-column variance.
double empirical_error(const PcaModel& full, const DataMatrix& data, Index k) {
  PcaModel model = full;
  model.components = full.components.leftCols(k);
  const DataMatrix back = pca_inverse(model, pca_transform(model, data.values));
  const Eigen::MatrixXd centered = data.values.rowwise() - data.values.colwise().mean();
  return (back.values - data.values).squaredNorm() / centered.squaredNorm();
}

}  // namespace

TEST_CASE("points on a diagonal line") {
  Eigen::MatrixXd x(20, 2);
  for (Index i = 0; i < 20; ++i) x.row(i).setConstant(static_cast<double>(i) - 4.0);
  const PcaModel model = pca_fit(make_data_matrix(x), 2);
  CHECK(std::abs(model.components(0, 0)) == doctest::Approx(std::sqrt(0.5)));
  CHECK(std::abs(model.components(1, 0)) == doctest::Approx(std::sqrt(0.5)));
  CHECK(std::abs(model.explained_variance(1)) < 1e-12);
}

TEST_CASE("isotropic gaussian has nearly equal variances") {
  const PcaModel model = pca_fit(make_data_matrix(oracle::gaussian_matrix(20000, 3, 1)), 3);
  CHECK(model.explained_variance(0) / model.explained_variance(2) < 1.1);
}

TEST_CASE("explained variances match an SVD") {
  const Eigen::MatrixXd x = oracle::uniform_matrix(100, 5, 2);
  const PcaModel model = pca_fit(make_data_matrix(x), 5);
  const Eigen::VectorXd sv = oracle::svd_variances(x);
  CHECK((model.explained_variance - sv).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(model.total_variance == doctest::Approx(sv.sum()).epsilon(1e-12));
  const Eigen::MatrixXd gram = model.components.transpose() * model.components;
  CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
  for (Index i = 1; i < 5; ++i) CHECK(model.explained_variance(i) <= model.explained_variance(i - 1));
  CHECK(std::abs(model.explained_variance.sum() - model.total_variance) < 1e-10);
  for (Index c = 0; c < 5; ++c) {
    Index arg = 0;
    model.components.col(c).cwiseAbs().maxCoeff(&arg);
    CHECK(model.components(arg, c) > 0.0);
  }
}

TEST_CASE("transform and inverse") {
  const DataMatrix data = make_data_matrix(oracle::gaussian_matrix(60, 4, 3) * 2.0);
  const PcaModel model = pca_fit(data, 4);
  const Embedding e = pca_transform(model, data);
  CHECK(e.source == EmbeddingSource::pca);
  CHECK(e.component_indices == std::vector<Index>{1, 2, 3, 4});
  CHECK((pca_inverse(model, e.coords).values - data.values).cwiseAbs().maxCoeff() < 1e-9);

  const Eigen::MatrixXd mean_row = model.mean.transpose();
  CHECK(pca_transform(model, mean_row).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(pca_transform(model, Eigen::MatrixXd::Zero(3, 3)), ParameterError);
  CHECK_THROWS_AS(pca_inverse(model, Eigen::MatrixXd::Zero(3, 2)), ParameterError);
  CHECK_THROWS_AS(pca_fit(data, 5), ParameterError);
}

TEST_CASE("reconstruction error is the residual variance ratio") {
  const DataMatrix data = make_data_matrix(oracle::gaussian_matrix(50, 6, 4) * Eigen::Vector<double, 6>(3, 2, 1.5, 1, 0.5, 0.2).asDiagonal());
  const PcaModel model = pca_fit(data, 6);
  CHECK(pca_reconstruction_error(model, 6) == doctest::Approx(0.0));
  CHECK(pca_reconstruction_error(model, 0) == doctest::Approx(1.0).epsilon(1e-12));
  double previous = 1.0;
  for (Index k = 0; k <= 6; ++k) {
    const double analytic = pca_reconstruction_error(model, k);
    CHECK(std::abs(analytic - empirical_error(model, data, k)) < 1e-8);
    CHECK(std::abs(analytic - model.explained_variance.tail(6 - k).sum() / model.total_variance) < 1e-12);
    CHECK(analytic <= previous + 1e-15);
    previous = analytic;
  }
  const PcaModel one = pca_fit(data, 1);
  CHECK(std::abs(pca_reconstruction_error(one, 1) * one.total_variance - one.explained_variance.tail(5).sum()) < 1e-8);
  CHECK_THROWS_AS(pca_reconstruction_error(model, 7), ParameterError);
}
