#pragma once

#include <Eigen/Core>

namespace dmap::stats {

double mean(const Eigen::VectorXd& x);
/// Population variance (divide by n).
double variance(const Eigen::VectorXd& x);
double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
/// Ranks 1..n with ties sharing their average rank.
Eigen::VectorXd ranks(const Eigen::VectorXd& x);
double spearman(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// R^2 of the least-squares fit y ~ design (design should include an
/// intercept column when one is wanted).
double r_squared(const Eigen::MatrixXd& design, const Eigen::VectorXd& y);

}  // namespace dmap::stats
