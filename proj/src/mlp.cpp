#include "calgap/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "calgap/error.hpp"
#include "calgap/rng.hpp"

namespace calgap {
namespace {

constexpr std::uint64_t kInitTag = 0x696e697469616c21ull;

void softmax_columns(Eigen::MatrixXd &logits) {
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    auto col = logits.col(j);
    col.array() -= col.maxCoeff();
    col = col.array().exp();
    col /= col.sum();
  }
}

void check_input_dim(const MlpModel &model, Eigen::Index rows) {
  if (static_cast<std::size_t>(rows) != model.input_dim())
    fail(ErrorKind::InvalidArgument, "input has dimension " + std::to_string(rows) +
                                         ", model expects " +
                                         std::to_string(model.input_dim()));
}

} // namespace

MlpModel::MlpModel(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) fail(ErrorKind::InvalidArgument, "model needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto &layer = layers_[l];
    if (layer.bias.size() != layer.weight.rows())
      fail(ErrorKind::InvalidArgument, "bias length does not match layer width");
    if (l > 0 && layer.weight.cols() != layers_[l - 1].weight.rows())
      fail(ErrorKind::InvalidArgument, "consecutive layer shapes do not chain");
  }
}

std::size_t MlpModel::input_dim() const noexcept {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().weight.cols());
}

std::size_t MlpModel::num_classes() const noexcept {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.back().weight.rows());
}

std::size_t MlpModel::parameter_count() const noexcept {
  std::size_t total = 0;
  for (const auto &layer : layers_)
    total += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  return total;
}

std::vector<std::size_t> MlpModel::layer_sizes() const {
  std::vector<std::size_t> sizes;
  if (layers_.empty()) return sizes;
  sizes.push_back(input_dim());
  for (const auto &layer : layers_) sizes.push_back(static_cast<std::size_t>(layer.weight.rows()));
  return sizes;
}

bool operator==(const MlpModel &a, const MlpModel &b) {
  if (a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t l = 0; l < a.layers_.size(); ++l) {
    const auto &x = a.layers_[l];
    const auto &y = b.layers_[l];
    if (x.weight.rows() != y.weight.rows() || x.weight.cols() != y.weight.cols()) return false;
    if (x.weight != y.weight || x.bias != y.bias) return false;
  }
  return true;
}

MlpModel init_mlp(std::span<const std::size_t> layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2)
    fail(ErrorKind::InvalidArgument, "need at least an input and an output layer size");
  if (std::any_of(layer_sizes.begin(), layer_sizes.end(), [](std::size_t s) { return s == 0; }))
    fail(ErrorKind::InvalidArgument, "layer sizes must be positive");
  if (layer_sizes.back() < 2)
    fail(ErrorKind::InvalidArgument, "output layer needs at least 2 classes");

  std::vector<DenseLayer> layers;
  const std::uint64_t key = derive_seed(seed, kInitTag);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const auto fan_in = static_cast<Eigen::Index>(layer_sizes[l]);
    const auto fan_out = static_cast<Eigen::Index>(layer_sizes[l + 1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    CounterRng rng(key, l);
    DenseLayer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
    // Fill in row-major order so the draw sequence does not depend on storage.
    for (Eigen::Index r = 0; r < fan_out; ++r)
      for (Eigen::Index c = 0; c < fan_in; ++c)
        layer.weight(r, c) = (2.0 * rng.uniform() - 1.0) * limit;
    layers.push_back(std::move(layer));
  }
  return MlpModel(std::move(layers));
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.begin(), logits.end());
  if (out.empty()) return out;
  const double top = *std::max_element(out.begin(), out.end());
  double total = 0.0;
  for (auto &z : out) {
    z = std::exp(z - top);
    total += z;
  }
  for (auto &z : out) z /= total;
  return out;
}

Eigen::MatrixXd forward_batch(const MlpModel &model,
                              const Eigen::Ref<const Eigen::MatrixXd> &inputs) {
  check_input_dim(model, inputs.rows());
  const auto &layers = model.layers();
  Eigen::MatrixXd act = inputs;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Eigen::MatrixXd z = layers[l].weight * act;
    z.colwise() += layers[l].bias;
    if (l + 1 < layers.size())
      act = z.cwiseMax(0.0);
    else
      act = std::move(z);
  }
  softmax_columns(act);
  return act;
}

std::vector<double> forward(const MlpModel &model, std::span<const double> x) {
  const Eigen::Map<const Eigen::VectorXd> input(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::MatrixXd probs = forward_batch(model, input);
  return {probs.data(), probs.data() + probs.size()};
}

XentLoss loss_xent(std::span<const double> probs, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= probs.size())
    fail(ErrorKind::InvalidArgument, "label outside the probability vector");
  const double p = probs[static_cast<std::size_t>(label)];
  if (p < kProbabilityFloor) return {-std::log(kProbabilityFloor), true};
  return {-std::log(p), false};
}

LossAndGradient loss_and_gradient(const MlpModel &model,
                                  const Eigen::Ref<const Eigen::MatrixXd> &inputs,
                                  std::span<const int> labels) {
  check_input_dim(model, inputs.rows());
  if (static_cast<std::size_t>(inputs.cols()) != labels.size() || labels.empty())
    fail(ErrorKind::InvalidArgument, "batch needs one label per input column");

  const auto &layers = model.layers();
  const std::size_t depth = layers.size();
  const auto n = static_cast<Eigen::Index>(labels.size());

  // activations[l] is the input to layer l; preacts[l] its affine output.
  std::vector<Eigen::MatrixXd> activations(depth);
  std::vector<Eigen::MatrixXd> preacts(depth);
  activations[0] = inputs;
  for (std::size_t l = 0; l < depth; ++l) {
    preacts[l] = layers[l].weight * activations[l];
    preacts[l].colwise() += layers[l].bias;
    if (l + 1 < depth) activations[l + 1] = preacts[l].cwiseMax(0.0);
  }
  Eigen::MatrixXd delta = preacts[depth - 1];
  softmax_columns(delta);

  LossAndGradient out;
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const int y = labels[static_cast<std::size_t>(j)];
    if (y < 0 || y >= delta.rows()) fail(ErrorKind::InvalidArgument, "label out of range");
    const auto col = delta.col(j);
    const auto loss = loss_xent(std::span<const double>(col.data(), col.size()), y);
    total += loss.value;
    out.saturated = out.saturated || loss.saturated;
    delta(y, j) -= 1.0;
  }
  out.loss = total / static_cast<double>(n);
  delta /= static_cast<double>(n);

  out.gradient.layers.resize(depth);
  for (std::size_t l = depth; l-- > 0;) {
    auto &g = out.gradient.layers[l];
    g.weight = delta * activations[l].transpose();
    g.bias = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = layers[l].weight.transpose() * delta;
      delta = (preacts[l - 1].array() > 0.0).select(back, 0.0);
    }
  }
  return out;
}

double mean_loss(const MlpModel &model, const Eigen::Ref<const Eigen::MatrixXd> &inputs,
                 std::span<const int> labels) {
  const Eigen::MatrixXd probs = forward_batch(model, inputs);
  double total = 0.0;
  for (Eigen::Index j = 0; j < probs.cols(); ++j) {
    const auto col = probs.col(j);
    total += loss_xent(std::span<const double>(col.data(), col.size()),
                       labels[static_cast<std::size_t>(j)])
                 .value;
  }
  return total / static_cast<double>(probs.cols());
}

} // namespace calgap
