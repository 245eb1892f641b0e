#include "calgap/optimizer.hpp"

#include <cmath>
#include <string>

#include "calgap/error.hpp"

namespace calgap {

Optimizer::Optimizer(OptimizerConfig config) : config_(config) {
  if (!(config_.learning_rate >= 0.0) || !std::isfinite(config_.learning_rate))
    fail(ErrorKind::InvalidArgument, "learning rate must be finite and non-negative");
  if (config_.momentum < 0.0 || config_.weight_decay < 0.0)
    fail(ErrorKind::InvalidArgument, "momentum and weight decay must be non-negative");
}

void Optimizer::step(std::span<const std::span<double>> params,
                     std::span<const std::span<const double>> grads) {
  if (params.size() != grads.size())
    fail(ErrorKind::InvalidArgument, "parameter and gradient block counts differ");
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != grads[b].size())
      fail(ErrorKind::InvalidArgument, "gradient block " + std::to_string(b) +
                                           " does not match its parameters");
    for (double g : grads[b])
      if (!std::isfinite(g))
        fail(ErrorKind::AbortRun,
             "non-finite gradient in block " + std::to_string(b) + " at step " +
                 std::to_string(steps_ + 1));
  }
  if (first_.empty()) {
    first_.resize(params.size());
    second_.resize(params.size());
    for (std::size_t b = 0; b < params.size(); ++b) {
      first_[b].assign(params[b].size(), 0.0);
      if (config_.kind == OptimizerKind::Adam) second_[b].assign(params[b].size(), 0.0);
    }
  } else if (first_.size() != params.size()) {
    fail(ErrorKind::InvalidArgument, "parameter layout changed between steps");
  }

  ++steps_;
  const double lr = config_.learning_rate;
  const double decay = 1.0 - lr * config_.weight_decay;
  const auto t = static_cast<double>(steps_);
  const double bias1 = 1.0 - std::pow(config_.beta1, t);
  const double bias2 = 1.0 - std::pow(config_.beta2, t);

  for (std::size_t b = 0; b < params.size(); ++b) {
    auto p = params[b];
    const auto g = grads[b];
    auto &m = first_[b];
    if (config_.kind == OptimizerKind::SgdMomentum) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] *= decay;
        m[i] = config_.momentum * m[i] + g[i];
        p[i] -= lr * m[i];
      }
    } else {
      auto &v = second_[b];
      for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] *= decay;
        m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
        v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
        p[i] -= lr * (m[i] / bias1) / (std::sqrt(v[i] / bias2) + config_.epsilon);
      }
    }
  }
}

void Optimizer::step(MlpModel &model, const Gradient &gradient) {
  auto &layers = model.layers();
  if (gradient.layers.size() != layers.size())
    fail(ErrorKind::InvalidArgument, "gradient depth does not match the model");
  std::vector<std::span<double>> params;
  std::vector<std::span<const double>> grads;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto &layer = layers[l];
    const auto &g = gradient.layers[l];
    params.emplace_back(layer.weight.data(), static_cast<std::size_t>(layer.weight.size()));
    params.emplace_back(layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
    grads.emplace_back(g.weight.data(), static_cast<std::size_t>(g.weight.size()));
    grads.emplace_back(g.bias.data(), static_cast<std::size_t>(g.bias.size()));
  }
  step(params, grads);
}

} // namespace calgap
