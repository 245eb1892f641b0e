#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "calgap/mlp.hpp"

namespace calgap {

enum class OptimizerKind { SgdMomentum, Adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  double momentum = 0.9; // SGD only
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// SGD with momentum or Adam, both with decoupled weight decay: parameters are
/// scaled by (1 - lr * wd) before the gradient update. State is kept per
/// parameter block and sized on the first step.
class Optimizer {
public:
  explicit Optimizer(OptimizerConfig config);

  const OptimizerConfig &config() const noexcept { return config_; }
  std::size_t steps_taken() const noexcept { return steps_; }

  /// Updates each params[i] from grads[i]. Throws AbortRun on a non-finite
  /// gradient, leaving every parameter untouched.
  void step(std::span<const std::span<double>> params,
            std::span<const std::span<const double>> grads);

  void step(MlpModel &model, const Gradient &gradient);

private:
  OptimizerConfig config_;
  std::size_t steps_ = 0;
  std::vector<std::vector<double>> first_;  // velocity (SGD) or first moment (Adam)
  std::vector<std::vector<double>> second_; // Adam second moment
};

} // namespace calgap
