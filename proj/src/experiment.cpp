#include "calgap/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "calgap/rng.hpp"

namespace calgap {
namespace {

constexpr std::uint64_t kTrainTag = 0x747261696e2d7365ull;
constexpr std::uint64_t kTestTag = 0x746573742d736574ull;
constexpr std::uint64_t kFreshTag = 0x66726573682d6570ull;
constexpr std::uint64_t kShuffleTag = 0x73687566666c6521ull;
constexpr std::uint64_t kModelTag = 0x6d6f64656c2d696eull;

Eigen::Map<const Eigen::MatrixXd> as_columns(const Samples &s) {
  return {s.features.data(), static_cast<Eigen::Index>(s.dim),
          static_cast<Eigen::Index>(s.size())};
}

Samples draw_train_set(const SyntheticTask &task, const TrainConfig &config, std::size_t epoch) {
  if (config.regime == Regime::FixedSubsample)
    return sample(task, config.train_size, derive_seed(config.seed, kTrainTag));
  return sample(task, config.train_size,
                derive_seed(derive_seed(config.seed, kFreshTag), epoch));
}

void shuffle(std::vector<std::size_t> &order, std::uint64_t seed, std::uint64_t epoch) {
  CounterRng rng(derive_seed(seed, kShuffleTag), epoch);
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(order[i - 1], order[j]);
  }
}

} // namespace

ExperimentPreset overparameterized_preset(std::uint64_t seed) {
  ExperimentPreset preset;
  preset.model.hidden = {256, 256};
  auto &c = preset.config;
  c.regime = Regime::FixedSubsample;
  c.train_size = 2000;
  c.test_size = 10000;
  c.epochs = 80;
  c.batch_size = 50;
  c.optimizer = OptimizerKind::Adam;
  c.learning_rate = 3e-4;
  c.eval_every = 80;
  c.seed = seed;
  return preset;
}

ExperimentPreset underparameterized_preset(std::uint64_t seed) {
  ExperimentPreset preset;
  preset.model.hidden = {8};
  auto &c = preset.config;
  c.regime = Regime::FreshSamples;
  c.train_size = 5000;
  c.test_size = 10000;
  c.epochs = 40;
  c.batch_size = 50;
  c.optimizer = OptimizerKind::Adam;
  c.learning_rate = 1e-2;
  c.eval_every = 50;
  c.seed = seed;
  return preset;
}

void validate(const TrainConfig &config) {
  if (config.train_size == 0 || config.test_size == 0 || config.epochs == 0 ||
      config.batch_size == 0 || config.eval_every == 0 || config.bins == 0)
    fail(ErrorKind::InvalidArgument, "training counts must all be positive");
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate))
    fail(ErrorKind::InvalidArgument, "learning rate must be positive and finite");
}

std::size_t batches_per_epoch(const TrainConfig &config) {
  return (config.train_size + config.batch_size - 1) / config.batch_size;
}

std::size_t total_batches(const TrainConfig &config) {
  return batches_per_epoch(config) * config.epochs;
}

std::vector<std::uint64_t> checkpoint_steps(const TrainConfig &config) {
  validate(config);
  const std::size_t total = total_batches(config);
  std::vector<std::uint64_t> steps;
  for (std::size_t s = config.eval_every; s <= total; s += config.eval_every) steps.push_back(s);
  if (total % config.eval_every != 0) steps.push_back(total);
  return steps;
}

Dataset predict(const MlpModel &model, const Samples &inputs, std::uint64_t step, Split split) {
  const Eigen::MatrixXd probs = forward_batch(model, as_columns(inputs));
  const bool binary = probs.rows() == 2;
  std::vector<PredictionRecord> records(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto &r = records[i];
    const auto col = probs.col(static_cast<Eigen::Index>(i));
    r.label = inputs.labels[i];
    if (binary)
      r.probs = {col(1)};
    else
      r.probs.assign(col.data(), col.data() + col.size());
    r.step = step;
    r.split = split;
  }
  return Dataset(std::move(records), static_cast<std::size_t>(probs.rows()));
}

ExperimentResult run_experiment(const SyntheticTask &task, const ModelSpec &model_spec,
                                const TrainConfig &config) {
  validate(config);
  std::vector<std::size_t> sizes{task.dim()};
  sizes.insert(sizes.end(), model_spec.hidden.begin(), model_spec.hidden.end());
  sizes.push_back(task.num_classes());

  ExperimentResult result;
  result.model = init_mlp(sizes, derive_seed(config.seed, kModelTag));
  result.parameter_count = result.model.parameter_count();
  result.total_batches = total_batches(config);

  const auto checkpoints = checkpoint_steps(config);
  const auto scheme = make_equal_width_bins(config.bins);
  const Samples test_set = sample(task, config.test_size, derive_seed(config.seed, kTestTag));
  Samples train_set = draw_train_set(task, config, 0);

  Optimizer optimizer(OptimizerConfig{.kind = config.optimizer,
                                      .learning_rate = config.learning_rate,
                                      .momentum = config.momentum,
                                      .weight_decay = config.weight_decay});

  const std::size_t n = config.train_size;
  std::vector<std::size_t> order(n);
  Eigen::MatrixXd batch(static_cast<Eigen::Index>(task.dim()),
                        static_cast<Eigen::Index>(config.batch_size));
  std::vector<int> batch_labels;
  batch_labels.reserve(config.batch_size);

  std::uint64_t step = 0;
  std::size_t next_checkpoint = 0;
  try {
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      if (config.regime == Regime::FreshSamples && epoch > 0)
        train_set = draw_train_set(task, config, epoch);
      const auto features = as_columns(train_set);
      std::iota(order.begin(), order.end(), std::size_t{0});
      shuffle(order, config.seed, epoch);

      for (std::size_t start = 0; start < n; start += config.batch_size) {
        const std::size_t count = std::min(config.batch_size, n - start);
        batch.resize(Eigen::NoChange, static_cast<Eigen::Index>(count));
        batch_labels.clear();
        for (std::size_t k = 0; k < count; ++k) {
          const std::size_t idx = order[start + k];
          batch.col(static_cast<Eigen::Index>(k)) = features.col(static_cast<Eigen::Index>(idx));
          batch_labels.push_back(train_set.labels[idx]);
        }
        const auto lg = loss_and_gradient(result.model, batch, batch_labels);
        if (!std::isfinite(lg.loss))
          fail(ErrorKind::AbortRun, "non-finite training loss at step " + std::to_string(step + 1));
        optimizer.step(result.model, lg.gradient);
        result.final_train_loss = lg.loss;
        ++step;

        if (next_checkpoint < checkpoints.size() && step == checkpoints[next_checkpoint]) {
          ++next_checkpoint;
          auto train_preds = predict(result.model, train_set, step, Split::Train);
          auto test_preds = predict(result.model, test_set, step, Split::Test);
          result.trajectory.push_back(decomposition_report(train_preds, test_preds, scheme, step));
          const bool keep =
              config.log_all_checkpoints ||
              std::find(config.log_steps.begin(), config.log_steps.end(), step) !=
                  config.log_steps.end();
          if (keep)
            result.logs.push_back({step, std::move(train_preds), std::move(test_preds)});
        }
      }
    }
  } catch (const Error &e) {
    if (e.kind() != ErrorKind::AbortRun) throw;
    result.aborted = true;
    result.abort_reason = e.what();
  }
  return result;
}

} // namespace calgap
