#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace calgap {

struct DenseLayer {
  Eigen::MatrixXd weight; // out x in
  Eigen::VectorXd bias;   // out
};

/// Fully connected classifier: ReLU on hidden layers, softmax on the output.
/// Binary tasks use a 2-way softmax.
class MlpModel {
public:
  MlpModel() = default;
  explicit MlpModel(std::vector<DenseLayer> layers);

  std::size_t input_dim() const noexcept;
  std::size_t num_classes() const noexcept;
  std::size_t parameter_count() const noexcept;
  /// Input dim, hidden widths, C.
  std::vector<std::size_t> layer_sizes() const;

  std::vector<DenseLayer> &layers() noexcept { return layers_; }
  const std::vector<DenseLayer> &layers() const noexcept { return layers_; }

  friend bool operator==(const MlpModel &a, const MlpModel &b);

private:
  std::vector<DenseLayer> layers_;
};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
/// `layer_sizes` needs at least input and output; no hidden layer gives
/// multinomial logistic regression.
MlpModel init_mlp(std::span<const std::size_t> layer_sizes, std::uint64_t seed);

/// Max-subtracted softmax.
std::vector<double> softmax(std::span<const double> logits);

std::vector<double> forward(const MlpModel &model, std::span<const double> x);
/// Column-per-sample probabilities (C x n) for column-per-sample inputs (dim x n).
Eigen::MatrixXd forward_batch(const MlpModel &model, const Eigen::Ref<const Eigen::MatrixXd> &inputs);

inline constexpr double kProbabilityFloor = 1e-12;

struct XentLoss {
  double value = 0.0;
  bool saturated = false; // p_y fell below the floor and was clamped
};

/// -log p_y, with p_y clamped at 1e-12.
XentLoss loss_xent(std::span<const double> probs, int label);

/// Same shapes as the model's layers.
struct Gradient {
  std::vector<DenseLayer> layers;
};

struct LossAndGradient {
  double loss = 0.0;
  bool saturated = false;
  Gradient gradient;
};

/// Mean cross-entropy over the batch and its gradient by backpropagation.
LossAndGradient loss_and_gradient(const MlpModel &model,
                                  const Eigen::Ref<const Eigen::MatrixXd> &inputs,
                                  std::span<const int> labels);

/// Mean cross-entropy only.
double mean_loss(const MlpModel &model, const Eigen::Ref<const Eigen::MatrixXd> &inputs,
                 std::span<const int> labels);

} // namespace calgap
