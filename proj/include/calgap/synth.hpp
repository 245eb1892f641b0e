#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "calgap/core.hpp"

namespace calgap {

inline constexpr std::size_t kDefaultTaskDim = 20;
inline constexpr double kDefaultNoiseScale = 2.0;
inline constexpr std::uint64_t kDefaultTaskSeed = 2023;
inline constexpr double kDefaultWeightNorm = 12.0;

/// Softmax-linear classification task over standard-normal inputs. The
/// ground-truth posterior is softmax(W x / noise_scale), or
/// sigmoid(w . x / noise_scale) in the binary case, so the Bayes predictor is
/// known in closed form.
class SyntheticTask {
public:
  /// Weight rows point in directions drawn from `seed` and have Euclidean norm
  /// `weight_norm`, so the logit w . x / noise_scale of a standard-normal input
  /// has standard deviation weight_norm / noise_scale.
  static SyntheticTask random(std::size_t dim, std::size_t num_classes, double noise_scale,
                              std::uint64_t seed, double weight_norm = kDefaultWeightNorm);
  /// `weights` is row-major: one row of length dim for binary tasks, C rows otherwise.
  static SyntheticTask with_weights(std::size_t dim, std::size_t num_classes,
                                    std::vector<double> weights, double noise_scale,
                                    std::uint64_t seed = 0);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  bool is_binary() const noexcept { return num_classes_ == 2; }
  double noise_scale() const noexcept { return noise_scale_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::span<const double> weights() const noexcept { return weights_; }

private:
  SyntheticTask(std::size_t dim, std::size_t num_classes, std::vector<double> weights,
                double noise_scale, std::uint64_t seed);

  std::size_t dim_;
  std::size_t num_classes_;
  std::vector<double> weights_;
  double noise_scale_;
  std::uint64_t seed_;
};

SyntheticTask default_binary_task();
SyntheticTask default_multiclass_task(); // C = 10

/// Labeled inputs, features stored row-major.
struct Samples {
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const double> row(std::size_t i) const noexcept {
    return {features.data() + i * dim, dim};
  }
  friend bool operator==(const Samples &, const Samples &) = default;
};

/// Ground-truth class probabilities at x (length C; binary returns [1 - s, s]).
std::vector<double> posterior(const SyntheticTask &task, std::span<const double> x);

/// Draws n labeled samples: x ~ N(0, I), y ~ posterior(x). Record i depends
/// only on (seed, i).
Samples sample(const SyntheticTask &task, std::size_t n, std::uint64_t seed);
/// Records [first, first + count) of the stream that `sample` draws from.
Samples sample_range(const SyntheticTask &task, std::size_t first, std::size_t count,
                     std::uint64_t seed);

/// Predictions of the Bayes predictor on `inputs`, with the inputs' labels.
Dataset bayes_predictions(const SyntheticTask &task, const Samples &inputs);

} // namespace calgap
