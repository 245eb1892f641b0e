#include "calgap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "calgap/rng.hpp"

namespace calgap {
namespace {

constexpr std::uint64_t kWeightTag = 0x7765696768747321ull;
constexpr std::uint64_t kSampleTag = 0x73616d706c657321ull;

double sigmoid(double z) {
  double s;
  if (z >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    s = e / (1.0 + e);
  }
  // Keep both 1 - s and s strictly inside (0, 1) even when exp saturates;
  // 1 - 2^-53 is the largest double below 1.
  constexpr double tiny = std::numeric_limits<double>::epsilon() / 2;
  return std::clamp(s, tiny, 1.0 - tiny);
}

std::size_t weight_rows(std::size_t num_classes) { return num_classes == 2 ? 1 : num_classes; }

} // namespace

SyntheticTask::SyntheticTask(std::size_t dim, std::size_t num_classes,
                             std::vector<double> weights, double noise_scale,
                             std::uint64_t seed)
    : dim_(dim), num_classes_(num_classes), weights_(std::move(weights)),
      noise_scale_(noise_scale), seed_(seed) {
  if (dim_ == 0) fail(ErrorKind::InvalidArgument, "task dimension must be positive");
  if (num_classes_ < 2) fail(ErrorKind::InvalidArgument, "a task needs at least 2 classes");
  if (!(noise_scale_ > 0.0) || !std::isfinite(noise_scale_))
    fail(ErrorKind::InvalidArgument, "noise scale must be positive and finite");
  if (weights_.size() != weight_rows(num_classes_) * dim_)
    fail(ErrorKind::InvalidArgument, "weight matrix has " + std::to_string(weights_.size()) +
                                         " entries, expected " +
                                         std::to_string(weight_rows(num_classes_) * dim_));
}

SyntheticTask SyntheticTask::random(std::size_t dim, std::size_t num_classes,
                                    double noise_scale, std::uint64_t seed, double weight_norm) {
  if (!(weight_norm >= 0.0) || !std::isfinite(weight_norm))
    fail(ErrorKind::InvalidArgument, "weight norm must be finite and non-negative");
  std::vector<double> weights(weight_rows(num_classes) * dim);
  CounterRng rng(derive_seed(seed, kWeightTag), 0);
  for (auto &w : weights) w = rng.normal();
  for (std::size_t r = 0; r < weight_rows(num_classes); ++r) {
    const auto row = std::span<double>(weights).subspan(r * dim, dim);
    double norm = 0.0;
    for (double w : row) norm += w * w;
    norm = std::sqrt(norm);
    if (norm > 0.0)
      for (auto &w : row) w *= weight_norm / norm;
  }
  return SyntheticTask(dim, num_classes, std::move(weights), noise_scale, seed);
}

SyntheticTask SyntheticTask::with_weights(std::size_t dim, std::size_t num_classes,
                                          std::vector<double> weights, double noise_scale,
                                          std::uint64_t seed) {
  return SyntheticTask(dim, num_classes, std::move(weights), noise_scale, seed);
}

SyntheticTask default_binary_task() {
  return SyntheticTask::random(kDefaultTaskDim, 2, kDefaultNoiseScale, kDefaultTaskSeed);
}

SyntheticTask default_multiclass_task() {
  return SyntheticTask::random(kDefaultTaskDim, 10, kDefaultNoiseScale, kDefaultTaskSeed);
}

std::vector<double> posterior(const SyntheticTask &task, std::span<const double> x) {
  if (x.size() != task.dim())
    fail(ErrorKind::InvalidArgument, "input has dimension " + std::to_string(x.size()) +
                                         ", task expects " + std::to_string(task.dim()));
  const auto w = task.weights();
  const std::size_t rows = weight_rows(task.num_classes());
  std::vector<double> logits(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double z = 0.0;
    for (std::size_t j = 0; j < task.dim(); ++j) z += w[r * task.dim() + j] * x[j];
    logits[r] = z / task.noise_scale();
  }
  if (task.is_binary()) {
    const double s = sigmoid(logits[0]);
    return {1.0 - s, s};
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (auto &z : logits) {
    z = std::exp(z - top);
    total += z;
  }
  for (auto &z : logits) z /= total;
  return logits;
}

Samples sample_range(const SyntheticTask &task, std::size_t first, std::size_t count,
                     std::uint64_t seed) {
  const std::uint64_t key = derive_seed(seed, kSampleTag);
  Samples out;
  out.dim = task.dim();
  out.features.resize(count * task.dim());
  out.labels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(key, first + i);
    const auto x = std::span<double>(out.features).subspan(i * task.dim(), task.dim());
    for (auto &v : x) v = rng.normal();
    const auto probs = posterior(task, x);
    const double u = rng.uniform();
    double cumulative = 0.0;
    int label = static_cast<int>(probs.size()) - 1;
    for (std::size_t c = 0; c + 1 < probs.size(); ++c) {
      cumulative += probs[c];
      if (u < cumulative) {
        label = static_cast<int>(c);
        break;
      }
    }
    out.labels[i] = label;
  }
  return out;
}

Samples sample(const SyntheticTask &task, std::size_t n, std::uint64_t seed) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "sample size must be positive");
  return sample_range(task, 0, n, seed);
}

Dataset bayes_predictions(const SyntheticTask &task, const Samples &inputs) {
  if (inputs.dim != task.dim())
    fail(ErrorKind::InvalidArgument, "inputs have dimension " + std::to_string(inputs.dim) +
                                         ", task expects " + std::to_string(task.dim()));
  std::vector<PredictionRecord> records(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto probs = posterior(task, inputs.row(i));
    records[i].label = inputs.labels[i];
    if (task.is_binary())
      records[i].probs = {probs[1]};
    else
      records[i].probs = std::move(probs);
  }
  return Dataset(std::move(records), task.num_classes());
}

} // namespace calgap
