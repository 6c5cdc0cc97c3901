#include "dmap/pca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "dmap/errors.hpp"

namespace dmap {

PcaModel pca_fit(const DataMatrix& data, Index k) {
  data.validate();
  const Index p = data.cols();
  if (k < 0 || k > p) throw ParameterError("PCA needs 0 <= k <= p = " + std::to_string(p));

  PcaModel model;
  model.mean = data.values.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.values.rowwise() - model.mean.transpose();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(data.rows());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const Eigen::VectorXd ascending = solver.eigenvalues();
  model.explained_variance = ascending.reverse().cwiseMax(0.0);
  model.total_variance = cov.trace();
  model.components.resize(p, k);
  for (Index c = 0; c < k; ++c) {
    Eigen::VectorXd axis = solver.eigenvectors().col(p - 1 - c);
    Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0.0) axis = -axis;
    model.components.col(c) = axis;
  }
  return model;
}

Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& values) {
  if (values.cols() != model.mean.size())
    throw ParameterError("PCA transform expects " + std::to_string(model.mean.size()) + " columns, got " +
                         std::to_string(values.cols()));
  return (values.rowwise() - model.mean.transpose()) * model.components;
}

Embedding pca_transform(const PcaModel& model, const DataMatrix& data) {
  Embedding out;
  out.coords = pca_transform(model, data.values);
  out.component_indices = leading_components(model.k());
  out.t = 0;
  out.source = EmbeddingSource::pca;
  return out;
}

DataMatrix pca_inverse(const PcaModel& model, const Eigen::MatrixXd& scores) {
  if (scores.cols() != model.k())
    throw ParameterError("PCA inverse expects " + std::to_string(model.k()) + " score columns, got " +
                         std::to_string(scores.cols()));
  Eigen::MatrixXd values = scores * model.components.transpose();
  values.rowwise() += model.mean.transpose();
  return make_data_matrix(std::move(values));
}

double pca_reconstruction_error(const PcaModel& model, Index k) {
  const Index p = model.explained_variance.size();
  if (k < 0 || k > p) throw ParameterError("reconstruction error needs 0 <= k <= p");
  if (!(model.total_variance > 0.0)) throw ParameterError("data has zero total variance");
  return model.explained_variance.tail(p - k).sum() / model.total_variance;
}

}  // namespace dmap
