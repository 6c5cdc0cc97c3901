#include "dmap/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "dmap/errors.hpp"
#include "dmap/seeding.hpp"

namespace dmap {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& samples, const std::vector<Index>& rows, std::size_t begin,
                               std::size_t end) {
  Eigen::MatrixXd out(samples.cols(), static_cast<Index>(end - begin));
  for (std::size_t k = begin; k < end; ++k) out.col(static_cast<Index>(k - begin)) = samples.row(rows[k]).transpose();
  return out;
}

double mean_column_variance(const Eigen::MatrixXd& samples_by_row) {
  if (samples_by_row.cols() == 0) return 0.0;
  const Eigen::RowVectorXd mean = samples_by_row.colwise().mean();
  return (samples_by_row.rowwise() - mean).array().square().colwise().mean().mean();
}

/// Learning-rate controller; call `after_epoch` with the monitored loss.
class Scheduler {
 public:
  Scheduler(const LrSchedule& schedule, double lr) : schedule_(schedule), lr_(lr) {}
  double lr() const { return lr_; }

  void after_epoch(int epoch, double monitored) {
    if (const auto* plateau = std::get_if<PlateauSchedule>(&schedule_)) {
      if (monitored < best_ * (1.0 - plateau->threshold)) {
        best_ = monitored;
        bad_epochs_ = 0;
      } else if (++bad_epochs_ > plateau->patience) {
        lr_ *= plateau->factor;
        bad_epochs_ = 0;
      }
    } else {
      const auto& step = std::get<StepSchedule>(schedule_);
      if ((epoch + 1) % step.step_size == 0) lr_ *= step.factor;
    }
  }

 private:
  LrSchedule schedule_;
  double lr_;
  double best_ = std::numeric_limits<double>::infinity();
  int bad_epochs_ = 0;
};

}  // namespace

void DecoderConfig::validate() const {
  for (int w : hidden_layers)
    if (w < 1) throw ParameterError("hidden layer widths must be >= 1");
  if (epochs < 1) throw ParameterError("epochs must be >= 1");
  if (batch_size < 1) throw ParameterError("batch size must be >= 1");
  if (!(l2_beta >= 0.0)) throw ParameterError("l2 beta must be >= 0");
  if (!(initial_lr > 0.0)) throw ParameterError("initial learning rate must be > 0");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ParameterError("train fraction must lie in (0, 1)");
  if (const auto* plateau = std::get_if<PlateauSchedule>(&schedule)) {
    if (!(plateau->factor > 0.0 && plateau->factor < 1.0)) throw ParameterError("schedule factor must lie in (0, 1)");
    if (!(plateau->threshold >= 0.0)) throw ParameterError("plateau threshold must be >= 0");
    if (plateau->patience < 0) throw ParameterError("plateau patience must be >= 0");
  } else {
    const auto& step = std::get<StepSchedule>(schedule);
    if (!(step.factor > 0.0 && step.factor < 1.0)) throw ParameterError("schedule factor must lie in (0, 1)");
    if (step.step_size < 1) throw ParameterError("step size must be >= 1");
  }
}

Decoder::Decoder(Index input_dim, Index output_dim, const std::vector<int>& hidden, std::uint64_t seed)
    : seed_(seed) {
  if (input_dim < 0 || output_dim < 1) throw ParameterError("decoder needs input_dim >= 0 and output_dim >= 1");
  dims_.push_back(input_dim);
  for (int w : hidden) {
    if (w < 1) throw ParameterError("hidden layer widths must be >= 1");
    dims_.push_back(w);
  }
  dims_.push_back(output_dim);

  Index total = 0;
  for (Index l = 0; l < layers(); ++l) {
    offsets_.push_back(total);
    total += dims_[l + 1] * dims_[l] + dims_[l + 1];
  }
  params_ = Eigen::VectorXd::Zero(total);

  std::mt19937_64 rng(seed);
  for (Index l = 0; l < layers(); ++l) {
    const Index fan_in = dims_[l];
    if (fan_in == 0) continue;
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Index k = 0; k < dims_[l + 1] * fan_in; ++k) params_(offsets_[l] + k) = dist(rng);
  }
  out_offset_ = Eigen::VectorXd::Zero(output_dim);
}

Eigen::Map<const Eigen::MatrixXd> Decoder::weight(Index layer) const {
  return {params_.data() + offsets_[layer], dims_[layer + 1], dims_[layer]};
}

Eigen::Map<const Eigen::VectorXd> Decoder::bias(Index layer) const {
  return {params_.data() + offsets_[layer] + dims_[layer + 1] * dims_[layer], dims_[layer + 1]};
}

Eigen::MatrixXd Decoder::forward(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != input_dim()) throw ParameterError("decoder input has wrong dimension");
  Eigen::MatrixXd a = inputs;
  for (Index l = 0; l < layers(); ++l) {
    Eigen::MatrixXd z = weight(l) * a;
    z.colwise() += bias(l);
    a = l + 1 < layers() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : std::move(z);
  }
  return a;
}

Eigen::MatrixXd Decoder::hidden_preactivations(const Eigen::MatrixXd& inputs) const {
  Index hidden_units = 0;
  for (Index l = 1; l + 1 < static_cast<Index>(dims_.size()); ++l) hidden_units += dims_[l];
  Eigen::MatrixXd out(hidden_units, inputs.cols());
  Eigen::MatrixXd a = inputs;
  Index row = 0;
  for (Index l = 0; l + 1 < layers(); ++l) {
    Eigen::MatrixXd z = weight(l) * a;
    z.colwise() += bias(l);
    out.middleRows(row, z.rows()) = z;
    row += z.rows();
    a = z.cwiseMax(0.0);
  }
  return out;
}

double Decoder::loss_and_gradient(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets, double beta,
                                  Eigen::VectorXd& grad) const {
  const Index count_layers = layers();
  std::vector<Eigen::MatrixXd> acts(static_cast<std::size_t>(count_layers + 1));
  std::vector<Eigen::MatrixXd> pre(static_cast<std::size_t>(count_layers));
  acts[0] = inputs;
  for (Index l = 0; l < count_layers; ++l) {
    pre[l] = weight(l) * acts[l];
    pre[l].colwise() += bias(l);
    acts[l + 1] = l + 1 < count_layers ? Eigen::MatrixXd(pre[l].cwiseMax(0.0)) : pre[l];
  }

  const Eigen::MatrixXd diff = acts[count_layers] - targets;
  const double count = static_cast<double>(diff.size());
  const double loss = diff.squaredNorm() / count + 0.5 * beta * params_.squaredNorm();

  grad.resize(params_.size());
  Eigen::MatrixXd delta = (2.0 / count) * diff;
  for (Index l = count_layers - 1; l >= 0; --l) {
    const Index rows = dims_[l + 1], cols = dims_[l];
    Eigen::Map<Eigen::MatrixXd> g_w(grad.data() + offsets_[l], rows, cols);
    Eigen::Map<Eigen::VectorXd> g_b(grad.data() + offsets_[l] + rows * cols, rows);
    g_w = delta * acts[l].transpose() + beta * weight(l);
    g_b = delta.rowwise().sum() + beta * bias(l);
    if (l > 0) {
      Eigen::MatrixXd back = weight(l).transpose() * delta;
      delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return loss;
}

void Decoder::set_output_transform(Eigen::VectorXd offset, double scale) {
  if (offset.size() != output_dim()) throw ParameterError("output offset has wrong dimension");
  out_offset_ = std::move(offset);
  out_scale_ = scale;
}

Eigen::MatrixXd Decoder::predict(const Eigen::MatrixXd& inputs) const {
  Eigen::MatrixXd out = out_scale_ * forward(inputs.transpose());
  out.colwise() += out_offset_;
  return out.transpose();
}

Decoder decoder_init(Index input_dim, Index output_dim, const DecoderConfig& config) {
  return Decoder(input_dim, output_dim, config.hidden_layers, config.seed);
}

std::pair<std::vector<Index>, std::vector<Index>> train_test_split(Index n, double train_fraction,
                                                                    std::uint64_t seed) {
  if (n < 2) throw ParameterError("train/test split needs at least 2 rows");
  const Index n_train = std::clamp<Index>(static_cast<Index>(std::llround(train_fraction * static_cast<double>(n))),
                                          1, n - 1);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Index> train(perm.begin(), perm.begin() + n_train), test(perm.begin() + n_train, perm.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

TrainReport decoder_train(Decoder& decoder, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                          const DecoderConfig& config) {
  config.validate();
  if (inputs.rows() != targets.rows()) throw ParameterError("inputs and targets need the same number of rows");
  if (inputs.cols() != decoder.input_dim() || targets.cols() != decoder.output_dim())
    throw ParameterError("inputs/targets do not match the decoder dimensions");

  const auto [train_rows, test_rows] = train_test_split(inputs.rows(), config.train_fraction, config.seed);
  Eigen::MatrixXd train_y(static_cast<Index>(train_rows.size()), targets.cols());
  Eigen::MatrixXd test_y(static_cast<Index>(test_rows.size()), targets.cols());
  for (std::size_t k = 0; k < train_rows.size(); ++k) train_y.row(static_cast<Index>(k)) = targets.row(train_rows[k]);
  for (std::size_t k = 0; k < test_rows.size(); ++k) test_y.row(static_cast<Index>(k)) = targets.row(test_rows[k]);

  // Train against centered targets divided by one global scale; the ratio of
  // reconstruction error to variance is unaffected.
  const Eigen::VectorXd offset = train_y.colwise().mean().transpose();
  double scale = std::sqrt(mean_column_variance(train_y));
  if (!(scale > 0.0)) scale = 1.0;
  Eigen::MatrixXd normalized = targets;
  normalized.rowwise() -= offset.transpose();
  normalized /= scale;

  const std::vector<Index> all_train = train_rows;
  const Eigen::MatrixXd train_in = gather_columns(inputs, all_train, 0, all_train.size());
  const Eigen::MatrixXd train_out = gather_columns(normalized, all_train, 0, all_train.size());
  const Eigen::MatrixXd test_in = gather_columns(inputs, test_rows, 0, test_rows.size());
  const Eigen::MatrixXd test_out = gather_columns(normalized, test_rows, 0, test_rows.size());

  TrainReport report;
  report.train_size = static_cast<Index>(train_rows.size());
  report.test_size = static_cast<Index>(test_rows.size());

  Eigen::VectorXd& theta = decoder.parameters();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd grad;
  long long step = 0;

  std::mt19937_64 rng(derive_seed(decoder.seed(), {0}));
  std::vector<Index> order = train_rows;
  Scheduler scheduler(config.schedule, config.initial_lr);
  const double unit = scale * scale;
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = scheduler.lr();
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::size_t end = std::min(order.size(), begin + batch);
      const Eigen::MatrixXd xb = gather_columns(inputs, order, begin, end);
      const Eigen::MatrixXd yb = gather_columns(normalized, order, begin, end);
      const double loss = decoder.loss_and_gradient(xb, yb, config.l2_beta, grad);
      if (!std::isfinite(loss) || !grad.allFinite())
        throw TrainingDivergenceError("decoder training diverged in epoch " + std::to_string(epoch), epoch);

      ++step;
      m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * grad;
      v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * grad.cwiseAbs2();
      const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(step));
      theta.array() -= (lr / bc1) * m.array() / ((v.array() / bc2).sqrt() + kAdamEps);
    }

    const double train_mse = (decoder.forward(train_in) - train_out).array().square().mean() * unit;
    const double test_mse = (decoder.forward(test_in) - test_out).array().square().mean() * unit;
    if (!std::isfinite(train_mse) || !std::isfinite(test_mse))
      throw TrainingDivergenceError("decoder training diverged in epoch " + std::to_string(epoch), epoch);
    report.loss_history.emplace_back(train_mse, test_mse);
    report.lr_history.push_back(lr);
    scheduler.after_epoch(epoch, test_mse);
  }

  report.final_train_loss = report.loss_history.back().first;
  report.final_test_loss = report.loss_history.back().second;
  report.epsilon_0 = mean_column_variance(test_y);
  report.epsilon_k_normalized = report.epsilon_0 > 0.0 ? report.final_test_loss / report.epsilon_0 : 0.0;
  const double train_var = mean_column_variance(train_y);
  report.epsilon_k_train_normalized = train_var > 0.0 ? report.final_train_loss / train_var : 0.0;
  decoder.set_output_transform(offset, scale);
  return report;
}

}  // namespace dmap
