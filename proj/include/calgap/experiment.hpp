#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "calgap/core.hpp"
#include "calgap/decomposition.hpp"
#include "calgap/mlp.hpp"
#include "calgap/optimizer.hpp"
#include "calgap/synth.hpp"

namespace calgap {

enum class Regime {
  FixedSubsample, // one training set drawn up front and revisited every epoch
  FreshSamples,   // a new training set drawn from the task every epoch
};

struct ModelSpec {
  std::vector<std::size_t> hidden;
};

struct TrainConfig {
  Regime regime = Regime::FixedSubsample;
  /// Fixed-subsample: size of the training set. Fresh-samples: samples per epoch.
  std::size_t train_size = 1000;
  std::size_t test_size = 10000;
  std::size_t epochs = 100;
  std::size_t batch_size = 50;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  double weight_decay = 0.0;
  std::size_t eval_every = 100; // batches between checkpoints
  std::size_t bins = kDefaultBins;
  std::uint64_t seed = 0;
  /// Keep prediction logs at these checkpoint steps; `log_all_checkpoints` keeps every one.
  std::vector<std::uint64_t> log_steps;
  bool log_all_checkpoints = false;
};

struct ExperimentPreset {
  ModelSpec model;
  TrainConfig config;
};

/// Wide 256x256 MLP on a fixed 2000-sample training set, Adam 3e-4 for 80
/// epochs: interpolates the default binary task well before the end.
ExperimentPreset overparameterized_preset(std::uint64_t seed = 0);
/// Width-8 MLP fed 5000 fresh samples per epoch, Adam 1e-2 for 40 epochs.
ExperimentPreset underparameterized_preset(std::uint64_t seed = 0);

/// Throws InvalidArgument unless every count is positive and the learning rate > 0.
void validate(const TrainConfig &config);

std::size_t batches_per_epoch(const TrainConfig &config);
std::size_t total_batches(const TrainConfig &config);
/// Checkpoint steps (1-based batch counts): every eval_every batches, plus
/// the final batch when it is not already a checkpoint.
std::vector<std::uint64_t> checkpoint_steps(const TrainConfig &config);

struct CheckpointLog {
  std::uint64_t step = 0;
  Dataset train;
  Dataset test;
};

struct ExperimentResult {
  std::vector<TrajectoryPoint> trajectory;
  std::vector<CheckpointLog> logs;
  std::size_t parameter_count = 0;
  std::size_t total_batches = 0;
  double final_train_loss = 0.0;
  bool aborted = false;
  std::string abort_reason;
  MlpModel model;
};

/// Predictions of `model` on `inputs` as a dataset; binary models emit f = p_1.
Dataset predict(const MlpModel &model, const Samples &inputs, std::uint64_t step, Split split);

/// Trains an MLP on `task` and evaluates train/test calibration at every
/// checkpoint. A non-finite loss or gradient stops the run; the trajectory up
/// to that point is returned with `aborted` set.
ExperimentResult run_experiment(const SyntheticTask &task, const ModelSpec &model_spec,
                                const TrainConfig &config);

} // namespace calgap
