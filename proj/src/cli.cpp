#include "calgap/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "calgap/decomposition.hpp"
#include "calgap/experiment.hpp"
#include "calgap/io.hpp"
#include "calgap/metrics.hpp"
#include "calgap/svg.hpp"
#include "calgap/synth.hpp"

namespace calgap {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// JSON has no NaN; empty-bin means are emitted as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const TrajectoryPoint &p) {
  return {{"step", p.step},           {"train_error", p.train_error},
          {"test_error", p.test_error}, {"train_ece", p.train_ece},
          {"test_ece", p.test_ece},     {"error_gap", p.error_gap},
          {"calib_gap", p.calib_gap}};
}

json to_json(const ReliabilityDiagram &d) {
  json bins = json::array();
  for (const auto &b : d.bins)
    bins.push_back({{"lower", b.lower},
                    {"upper", b.upper},
                    {"count", b.count},
                    {"mean_confidence", number_or_null(b.mean_confidence)},
                    {"accuracy", number_or_null(b.accuracy)}});
  return bins;
}

struct TaskOptions {
  std::string task = "binary";
  std::size_t dim = kDefaultTaskDim;
  double noise = kDefaultNoiseScale;
  double weight_norm = kDefaultWeightNorm;
  std::uint64_t task_seed = kDefaultTaskSeed;

  void add_to(CLI::App &cmd) {
    cmd.add_option("--task", task, "Synthetic task")
        ->check(CLI::IsMember({"binary", "multi10"}))
        ->capture_default_str();
    cmd.add_option("--dim", dim, "Input dimension")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--noise", noise, "Posterior temperature (noise scale)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--weight-norm", weight_norm, "Norm of each ground-truth weight row")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd.add_option("--task-seed", task_seed, "Seed of the ground-truth weights")->capture_default_str();
  }

  SyntheticTask build() const {
    return SyntheticTask::random(dim, task == "binary" ? 2 : 10, noise, task_seed, weight_norm);
  }
};

int cmd_gen(const TaskOptions &task_opts, std::size_t n, std::uint64_t seed, const fs::path &out_path,
            std::ostream &out) {
  const auto samples = sample(task_opts.build(), n, seed);
  std::ofstream file(out_path);
  if (!file) fail(ErrorKind::IoError, "cannot write " + out_path.string());
  write_samples(file, samples);
  if (!file) fail(ErrorKind::IoError, "failed writing " + out_path.string());
  out << json{{"out", out_path.string()}, {"n", n}, {"dim", samples.dim}}.dump() << '\n';
  return kExitOk;
}

struct TrainOptions {
  std::string regime = "over";
  std::vector<std::size_t> hidden;
  std::size_t epochs = 0;
  std::size_t batch = 0;
  std::string opt = "adam";
  double lr = 0.0;
  double momentum = 0.9;
  double wd = 0.0;
  std::size_t eval_every = 0;
  std::size_t bins = kDefaultBins;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t test_n = 0;
  std::size_t snapshots = 4;
  std::string out_dir;
};

// Checkpoints whose logs and diagrams are written: `count` evenly spaced ones
// ending at the final checkpoint, or all of them when count is 0.
std::vector<std::uint64_t> snapshot_steps(const std::vector<std::uint64_t> &checkpoints,
                                          std::size_t count) {
  if (count == 0 || count >= checkpoints.size()) return checkpoints;
  std::set<std::uint64_t> picked;
  for (std::size_t k = 1; k <= count; ++k)
    picked.insert(checkpoints[(k * checkpoints.size()) / count - 1]);
  return {picked.begin(), picked.end()};
}

int cmd_train(const TaskOptions &task_opts, const TrainOptions &o, const CLI::App &cmd,
              std::ostream &out, std::ostream &err) {
  auto preset = o.regime == "over" ? overparameterized_preset(o.seed)
                                   : underparameterized_preset(o.seed);
  auto &c = preset.config;
  const auto given = [&](const char *flag) { return cmd.count(flag) > 0; };
  if (given("--hidden")) preset.model.hidden = o.hidden;
  if (given("--epochs")) c.epochs = o.epochs;
  if (given("--batch")) c.batch_size = o.batch;
  if (given("--opt")) c.optimizer = o.opt == "sgd" ? OptimizerKind::SgdMomentum : OptimizerKind::Adam;
  if (given("--lr")) c.learning_rate = o.lr;
  if (given("--eval-every")) c.eval_every = o.eval_every;
  if (given("--n")) c.train_size = o.n;
  if (given("--test-n")) c.test_size = o.test_n;
  c.momentum = o.momentum;
  c.weight_decay = o.wd;
  c.bins = o.bins;
  c.log_steps = snapshot_steps(checkpoint_steps(c), o.snapshots);

  const fs::path dir(o.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());

  const auto task = task_opts.build();
  const auto result = run_experiment(task, preset.model, c);

  write_trajectory(dir / "trajectory.csv", result.trajectory);
  {
    std::ofstream log(dir / "predictions.jsonl");
    if (!log) fail(ErrorKind::IoError, "cannot write predictions.jsonl");
    for (const auto &cp : result.logs) {
      write_log(log, cp.train);
      write_log(log, cp.test);
    }
  }
  const auto scheme = make_equal_width_bins(c.bins);
  for (const auto &cp : result.logs) {
    for (const auto *data : {&cp.train, &cp.test}) {
      const auto split = data == &cp.train ? Split::Train : Split::Test;
      const auto name = "reliability_step" + std::to_string(cp.step) + "_" +
                        std::string(to_string(split)) + ".svg";
      render_reliability_svg(reliability(*data, scheme), dir / name,
                             std::string(to_string(split)) + " @ batch " + std::to_string(cp.step));
    }
  }

  json meta = {{"regime", o.regime},
               {"hidden", preset.model.hidden},
               {"parameter_count", result.parameter_count},
               {"train_size", c.train_size},
               {"test_size", c.test_size},
               {"epochs", c.epochs},
               {"batch_size", c.batch_size},
               {"optimizer", c.optimizer == OptimizerKind::Adam ? "adam" : "sgd"},
               {"learning_rate", c.learning_rate},
               {"momentum", c.momentum},
               {"weight_decay", c.weight_decay},
               {"eval_every", c.eval_every},
               {"bins", c.bins},
               {"seed", c.seed},
               {"task", {{"name", task_opts.task},
                         {"dim", task_opts.dim},
                         {"noise", task_opts.noise},
                         {"weight_norm", task_opts.weight_norm},
                         {"task_seed", task_opts.task_seed}}},
               {"threads", 1},
               {"total_batches", result.total_batches},
               {"checkpoints", result.trajectory.size()},
               {"snapshot_steps", c.log_steps},
               {"aborted", result.aborted}};
  if (result.aborted) meta["abort_reason"] = result.abort_reason;
  {
    std::ofstream f(dir / "run.json");
    f << meta.dump(2) << '\n';
  }

  json summary = {{"out_dir", dir.string()}, {"checkpoints", result.trajectory.size()},
                  {"parameter_count", result.parameter_count}, {"aborted", result.aborted}};
  if (!result.trajectory.empty()) summary["final"] = to_json(result.trajectory.back());
  out << summary.dump() << '\n';
  if (result.aborted) {
    err << "training aborted: " << result.abort_reason << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_metrics(const fs::path &log_path, std::size_t bins, const std::string &binning,
                std::ostream &out) {
  const auto groups = parse_log(log_path);
  if (groups.empty()) fail(ErrorKind::EmptyInput, "log has no records");
  json reports = json::array();
  for (const auto &g : groups) {
    BinningScheme scheme = make_equal_width_bins(bins);
    if (binning == "mass") {
      std::vector<double> confs;
      for (const auto &p : confidence_pairs(g.data)) confs.push_back(p.confidence);
      scheme = make_equal_mass_bins(bins, confs);
    }
    const auto r = compute_metrics(g.data, scheme, bins);
    reports.push_back({{"split", std::string(to_string(g.split))},
                       {"step", g.step},
                       {"n", g.data.size()},
                       {"num_classes", g.data.num_classes()},
                       {"ece_binned", r.ece_binned},
                       {"ece_exact", r.ece_exact},
                       {"mce", r.mce},
                       {"brier", r.brier},
                       {"sce", r.sce},
                       {"ace", r.ace},
                       {"ace_degenerate", r.ace_degenerate},
                       {"error", r.error},
                       {"binning",
                        {{"kind", binning},
                         {"requested_bins", scheme.requested_bins()},
                         {"bins", scheme.num_bins()},
                         {"degenerate", scheme.degenerate()}}},
                       {"diagram", to_json(r.diagram)}});
  }
  out << reports.dump(2) << '\n';
  return kExitOk;
}

int cmd_decompose(const fs::path &log_path, std::size_t bins, std::ostream &out,
                  std::ostream &err) {
  const auto groups = parse_log(log_path);
  std::map<std::uint64_t, const Dataset *> train, test;
  for (const auto &g : groups) (g.split == Split::Train ? train : test)[g.step] = &g.data;

  const auto scheme = make_equal_width_bins(bins);
  json points = json::array();
  bool all_hold = true;
  for (const auto &[step, train_data] : train) {
    const auto it = test.find(step);
    if (it == test.end()) {
      err << "step " << step << " has no test records; skipped\n";
      continue;
    }
    const auto p = decomposition_report(*train_data, *it->second, scheme, step);
    const bool holds = decomposition_identity_holds(p);
    all_hold = all_hold && holds;
    auto j = to_json(p);
    j["identity_holds"] = holds;
    points.push_back(std::move(j));
  }
  for (const auto &[step, _] : test)
    if (!train.contains(step)) err << "step " << step << " has no train records; skipped\n";
  if (points.empty()) fail(ErrorKind::EmptyInput, "no step has both train and test records");
  out << json{{"points", points}, {"all_identities_hold", all_hold}}.dump(2) << '\n';
  return kExitOk;
}

int cmd_check_claims(const fs::path &path, double tol1, double tol2, double min_fraction,
                     double warmup, std::ostream &out) {
  auto trajectory = parse_trajectory(path);
  if (trajectory.empty()) fail(ErrorKind::EmptyInput, "trajectory has no rows");
  const std::uint64_t last = trajectory.back().step;
  const auto cutoff = static_cast<double>(last) * warmup;
  std::erase_if(trajectory, [&](const TrajectoryPoint &p) {
    return warmup > 0.0 && static_cast<double>(p.step) <= cutoff;
  });
  if (trajectory.empty()) fail(ErrorKind::EmptyInput, "warmup removed every checkpoint");

  const auto report = evaluate_claims(trajectory, tol2, tol1);
  const bool claim1 = report.claim1_violations.empty();
  const bool claim2 = report.claim2_holds_fraction >= min_fraction;
  out << json{{"checkpoints", trajectory.size()},
              {"claim1_threshold", tol1},
              {"claim1_max_train_ece", report.claim1_max_train_ece},
              {"claim1_violations", report.claim1_violations},
              {"claim1_holds", claim1},
              {"claim2_tolerance", tol2},
              {"claim2_holds_fraction", report.claim2_holds_fraction},
              {"claim2_min_fraction", min_fraction},
              {"claim2_slack", report.claim2_slack},
              {"claim2_violations", report.violations},
              {"claim2_holds", claim2}}
             .dump(2)
      << '\n';
  return claim1 && claim2 ? kExitOk : kExitClaimsViolated;
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Calibration decomposition laboratory", "calgap"};
  app.require_subcommand(1);

  TaskOptions gen_task;
  std::size_t gen_n = 1000;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto *gen = app.add_subcommand("gen", "Write a sampled synthetic dataset as CSV");
  gen_task.add_to(*gen);
  gen->add_option("--n", gen_n, "Number of samples")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--seed", gen_seed, "Sampling seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output CSV")->required();

  TaskOptions train_task;
  TrainOptions t;
  auto *train = app.add_subcommand("train", "Run a training experiment");
  train_task.add_to(*train);
  train->add_option("--regime", t.regime, "over: fixed subsample, under: fresh samples")
      ->check(CLI::IsMember({"over", "under"}))
      ->capture_default_str();
  train->add_option("--hidden", t.hidden, "Hidden widths, e.g. 256,256 (default 256,256 over / 8 under)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  train->add_option("--epochs", t.epochs, "Epochs (default 80 over / 40 under)")->check(CLI::PositiveNumber);
  train->add_option("--batch", t.batch, "Batch size (default 50)")->check(CLI::PositiveNumber);
  train->add_option("--opt", t.opt, "Optimizer (default adam)")->check(CLI::IsMember({"sgd", "adam"}));
  train->add_option("--lr", t.lr, "Learning rate (default 3e-4 over / 1e-2 under)")
      ->check(CLI::PositiveNumber);
  train->add_option("--momentum", t.momentum, "SGD momentum")->capture_default_str();
  train->add_option("--wd", t.wd, "Decoupled weight decay")->capture_default_str();
  train->add_option("--eval-every", t.eval_every, "Batches between checkpoints (default 80 over / 50 under)")
      ->check(CLI::PositiveNumber);
  train->add_option("--bins", t.bins, "Equal-width ECE bins")->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--seed", t.seed, "Run seed")->capture_default_str();
  train->add_option("--n", t.n, "Training set size / samples per epoch (default 2000 over / 5000 under)")
      ->check(CLI::PositiveNumber);
  train->add_option("--test-n", t.test_n, "Held-out test size (default 10000)")->check(CLI::PositiveNumber);
  train->add_option("--snapshots", t.snapshots,
                    "Checkpoints with prediction logs and SVGs, evenly spaced (0 = all)")
      ->capture_default_str();
  train->add_option("--out-dir", t.out_dir, "Output directory")->required();

  std::string metrics_log;
  std::size_t metrics_bins = kDefaultBins;
  std::string metrics_binning = "width";
  auto *metrics = app.add_subcommand("metrics", "Calibration metrics per (split, step) group");
  metrics->add_option("--log", metrics_log, "Prediction log (JSON lines)")->required();
  metrics->add_option("--bins", metrics_bins, "Bin count")->check(CLI::PositiveNumber)->capture_default_str();
  metrics->add_option("--binning", metrics_binning, "Bin layout for ECE/MCE/SCE")
      ->check(CLI::IsMember({"width", "mass"}))
      ->capture_default_str();

  std::string decompose_log;
  std::size_t decompose_bins = kDefaultBins;
  auto *decompose = app.add_subcommand("decompose", "Train/test decomposition per step");
  decompose->add_option("--log", decompose_log, "Prediction log (JSON lines)")->required();
  decompose->add_option("--bins", decompose_bins, "Bin count")->check(CLI::PositiveNumber)->capture_default_str();

  std::string claims_path;
  double tol1 = kClaim1Threshold, tol2 = kClaim2Tolerance, min_fraction = 0.95, warmup = 0.0;
  auto *check = app.add_subcommand("check-claims", "Evaluate both claims on a trajectory CSV");
  check->add_option("--trajectory", claims_path, "Trajectory CSV")->required();
  check->add_option("--tol1", tol1, "Claim 1: max train ECE")->capture_default_str();
  check->add_option("--tol2", tol2, "Claim 2: slack on calib_gap <= error_gap")->capture_default_str();
  check->add_option("--min-fraction", min_fraction, "Claim 2: required fraction of checkpoints")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  check->add_option("--warmup", warmup, "Skip checkpoints in this leading fraction of steps")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(gen_task, gen_n, gen_seed, gen_out, out);
    if (*train) return cmd_train(train_task, t, *train, out, err);
    if (*metrics) return cmd_metrics(metrics_log, metrics_bins, metrics_binning, out);
    if (*decompose) return cmd_decompose(decompose_log, decompose_bins, out, err);
    if (*check) return cmd_check_claims(claims_path, tol1, tol2, min_fraction, warmup, out);
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

} // namespace calgap
