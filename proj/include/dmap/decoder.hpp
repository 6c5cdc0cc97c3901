#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "dmap/data_matrix.hpp"

namespace dmap {

/// Multiply the learning rate by `factor` once the monitored (test) loss has
/// not improved by a relative `threshold` for more than `patience` epochs.
struct PlateauSchedule {
  double threshold = 0.01;
  double factor = 0.1;
  int patience = 10;
};

/// Multiply the learning rate by `factor` every `step_size` epochs.
struct StepSchedule {
  int step_size = 10;
  double factor = 0.5;
};

using LrSchedule = std::variant<PlateauSchedule, StepSchedule>;

struct DecoderConfig {
  std::vector<int> hidden_layers{50, 50, 50};
  int epochs = 100;
  int batch_size = 32;
  double l2_beta = 1e-6;
  double initial_lr = 0.05;
  LrSchedule schedule = PlateauSchedule{};
  double train_fraction = 2500.0 / 3000.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Fully connected ReLU network with a linear output layer. Parameters live in
/// one flat vector (per layer: weights column-major, then biases) so the
/// optimizer and finite-difference checks can treat them uniformly.
class Decoder {
 public:
  Decoder(Index input_dim, Index output_dim, const std::vector<int>& hidden, std::uint64_t seed);

  Index input_dim() const { return dims_.front(); }
  Index output_dim() const { return dims_.back(); }
  Index layers() const { return static_cast<Index>(dims_.size()) - 1; }
  std::uint64_t seed() const { return seed_; }

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }

  Eigen::Map<const Eigen::MatrixXd> weight(Index layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(Index layer) const;

  /// Raw network output for samples stored as columns (features x batch).
  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs) const;

  /// C = mean((out - targets)^2) + beta/2 * ||theta||^2 over a column batch.
  /// Writes dC/dtheta into `grad` and returns C.
  double loss_and_gradient(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets, double beta,
                           Eigen::VectorXd& grad) const;

  /// Pre-activations of every hidden unit (hidden layers stacked) per sample.
  Eigen::MatrixXd hidden_preactivations(const Eigen::MatrixXd& inputs) const;

  /// Fixed affine map applied after the network: y = offset + scale * out.
  void set_output_transform(Eigen::VectorXd offset, double scale);

  /// Predictions in target units for samples stored as rows (n x input_dim).
  Eigen::MatrixXd predict(const Eigen::MatrixXd& inputs) const;

 private:
  std::vector<Index> dims_;
  std::vector<Index> offsets_;  ///< start of each layer's block in params_
  Eigen::VectorXd params_;
  Eigen::VectorXd out_offset_;
  double out_scale_ = 1.0;
  std::uint64_t seed_;
};

/// He-style uniform init: weights ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero biases.
Decoder decoder_init(Index input_dim, Index output_dim, const DecoderConfig& config);

struct TrainReport {
  double final_train_loss = 0.0;  ///< mean squared error in data units
  double final_test_loss = 0.0;
  std::vector<std::pair<double, double>> loss_history;  ///< (train, test) per epoch
  std::vector<double> lr_history;
  double epsilon_0 = 0.0;  ///< mean per-column variance of the test targets
  double epsilon_k_normalized = 0.0;
  double epsilon_k_train_normalized = 0.0;
  Index train_size = 0;
  Index test_size = 0;
};

/// Splits rows by a shuffle seeded with config.seed, trains with Adam on the
/// training rows (minibatch order seeded by the decoder's seed) and reports
/// losses on both splits. Targets are centered and scaled by one global factor
/// for training; reported losses are in the original units.
TrainReport decoder_train(Decoder& decoder, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                          const DecoderConfig& config);

/// Train/test row indices for a given size and config.
std::pair<std::vector<Index>, std::vector<Index>> train_test_split(Index n, double train_fraction,
                                                                    std::uint64_t seed);

}  // namespace dmap
