// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include "calgap/decomposition.hpp"
#include "calgap/experiment.hpp"
#include "calgap/metrics.hpp"
#include "calgap/synth.hpp"
#include "gradcheck.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace calgap;
namespace fs = std::filesystem;

namespace {

constexpr int kSeeds = 5;
constexpr double kWarmupFraction = 0.05;
constexpr double kMaxRunSeconds = 120.0;

int g_failures = 0;

void report(const char *id, bool pass, const std::string &detail) {
  std::cout << (pass ? "PASS " : "FAIL ") << id << "  " << detail << std::endl;
  if (!pass) ++g_failures;
}

std::string fmt(const char *pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

struct Run {
  ExperimentResult result;
  double seconds = 0.0;
};

Run timed_run(const ExperimentPreset &preset) {
  const auto start = std::chrono::steady_clock::now();
  Run run{run_experiment(default_binary_task(), preset.model, preset.config), 0.0};
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

bool after_warmup(const TrajectoryPoint &p, const ExperimentResult &r) {
  return static_cast<double>(p.step) > kWarmupFraction * static_cast<double>(r.total_batches);
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// A1 for one regime: train ECE bound after warmup and the per-run time budget.
std::string claim1_detail(const std::vector<Run> &runs, bool &pass) {
  double worst = 0.0, slowest = 0.0;
  std::size_t bad = 0;
  for (const auto &run : runs) {
    slowest = std::max(slowest, run.seconds);
    if (run.result.aborted) pass = false;
    for (const auto &p : run.result.trajectory) {
      if (!after_warmup(p, run.result)) continue;
      worst = std::max(worst, p.train_ece);
      if (p.train_ece > kClaim1Threshold) ++bad;
    }
  }
  pass = pass && bad == 0 && slowest <= kMaxRunSeconds;
  return fmt("max train ECE %.4f, %zu checkpoints above %.2f, slowest run %.1fs", worst, bad,
             kClaim1Threshold, slowest);
}

} // namespace

int main() {
  std::vector<Run> over, under;
  for (int seed = 0; seed < kSeeds; ++seed) {
    over.push_back(timed_run(overparameterized_preset(static_cast<std::uint64_t>(seed))));
    under.push_back(timed_run(underparameterized_preset(static_cast<std::uint64_t>(seed))));
  }

  {
    bool over_pass = true, under_pass = true;
    const auto over_detail = claim1_detail(over, over_pass);
    const auto under_detail = claim1_detail(under, under_pass);
    report("A1", over_pass && under_pass,
           "over: " + over_detail + "; under: " + under_detail);
  }

  {
    std::vector<TrajectoryPoint> all;
    for (const auto &run : over)
      all.insert(all.end(), run.result.trajectory.begin(), run.result.trajectory.end());
    const auto claims = evaluate_claims(all, kClaim2Tolerance);
    report("A2", claims.claim2_holds_fraction >= 0.95,
           fmt("calib_gap <= error_gap + %.2f at %.1f%% of %zu checkpoints (need 95%%)",
               kClaim2Tolerance, 100 * claims.claim2_holds_fraction, all.size()));
  }

  {
    double worst = 0.0;
    std::size_t bad = 0;
    for (const auto &run : under)
      for (const auto &p : run.result.trajectory) {
        if (!after_warmup(p, run.result)) continue;
        worst = std::max(worst, p.test_ece);
        if (p.test_ece > 0.05) ++bad;
      }
    report("A3", bad == 0, fmt("max post-warmup test ECE %.4f, %zu checkpoints above 0.05", worst, bad));
  }

  {
    bool pass = true;
    std::string detail;
    for (const auto &run : over) {
      const auto &last = run.result.trajectory.back();
      const auto check = interpolation_limit_check(last, 0.05);
      pass = pass && check == LimitCheck::Holds;
      detail += fmt("[train_err %.4f, |test_ece - test_err| = %.4f%s] ", last.train_error,
                    std::abs(last.test_ece - last.test_error),
                    check == LimitCheck::NotApplicable ? ", not interpolating" : "");
    }
    report("A4", pass, detail);
  }

  {
    bool pass = true;
    std::string detail;
    for (const auto &run : over) {
      double lowest = 1.0;
      for (const auto &p : run.result.trajectory)
        if (after_warmup(p, run.result)) lowest = std::min(lowest, p.calib_gap);
      const double rise = run.result.trajectory.back().calib_gap - lowest;
      pass = pass && rise >= 0.05;
      detail += fmt("%.4f ", rise);
    }
    report("A5", pass, "final calib_gap minus post-warmup minimum per seed: " + detail + "(need >= 0.05)");
  }

  {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      CounterRng rng(seed, 1234);
      const std::size_t classes = seed % 2 ? 10 : 2;
      const std::size_t n = 1 + rng.below(1000);
      const std::size_t bins = 1 + rng.below(30);
      const auto data = testing_support::random_dataset(seed + 7000, n, classes);
      const auto edges = oracle::uniform_edges(bins);
      const auto scheme = make_equal_width_bins(bins);
      worst = std::max({worst,
                        std::abs(ece_binned(data, scheme) - oracle::binned_ece(oracle::top_label(data), edges)),
                        std::abs(sce(data, scheme) - oracle::sce(data, edges)),
                        std::abs(ace(data, bins).value - oracle::ace(data, bins))});
    }
    report("B1", worst <= 1e-12, fmt("max deviation from naive references %.3g over 100 datasets", worst));
  }

  {
    const auto task = default_binary_task();
    const auto scheme = make_equal_width_bins(kDefaultBins);
    double large_sum = 0.0, small_sum = 0.0, large_max = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const double large = ece_binned(bayes_predictions(task, sample(task, 50000, 900 + seed)), scheme);
      const double small = ece_binned(bayes_predictions(task, sample(task, 5000, 950 + seed)), scheme);
      large_sum += large;
      small_sum += small;
      large_max = std::max(large_max, large);
    }
    report("B2", large_max <= 0.05 && large_sum <= 0.5 * small_sum,
           fmt("max ECE at 50k %.4f; mean ECE 50k %.4f vs 5k %.4f (ratio %.3f, need <= 0.5)", large_max,
               large_sum / 10, small_sum / 10, large_sum / small_sum));
  }

  {
    double worst = 0.0;
    std::size_t largest = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto r = testing_support::gradient_check(seed + 100);
      worst = std::max(worst, r.max_relative_error);
      largest = std::max(largest, r.parameters);
    }
    report("B4", worst <= 1e-4 && largest <= 200,
           fmt("max relative error %.3g over 20 models (largest %zu parameters)", worst, largest));
  }

  {
    const auto dir = fs::temp_directory_path() / "calgap_acceptance_b5";
    fs::remove_all(dir);
    bool pass = true;
    std::string detail;
    const std::vector<std::string> configs{"--regime under --seed 3",
                                           "--regime over --epochs 10 --seed 3"};
    for (std::size_t i = 0; i < configs.size(); ++i) {
      std::string outputs[2];
      for (int rep = 0; rep < 2; ++rep) {
        const auto out = dir / (std::to_string(i) + "_" + std::to_string(rep));
        const std::string cmd = std::string(CALGAP_CLI_PATH) + " train " + configs[i] + " --out-dir " +
                                out.string() + " > /dev/null";
        const int status = std::system(cmd.c_str());
        if (status != 0) pass = false;
        outputs[rep] = slurp(out / "trajectory.csv");
      }
      const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
      pass = pass && same;
      detail += "'" + configs[i] + "': " + (same ? "identical" : "DIFFERENT") + "; ";
    }
    fs::remove_all(dir);
    report("B5", pass, detail);
  }

  {
    std::size_t checked = 0, order = 0, collapse = 0, perm = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
      const std::size_t classes = seed % 3 ? 2 : 10;
      const auto data = testing_support::random_dataset(seed + 20000, 1 + (seed * 37) % 800, classes);
      const auto shuffled = testing_support::permuted(data, seed);
      std::vector<double> confs;
      CompensatedSum conf, hits;
      for (const auto &p : confidence_pairs(data)) {
        confs.push_back(p.confidence);
        conf += p.confidence;
        hits += p.outcome;
      }
      const double n = static_cast<double>(data.size());
      for (const auto &scheme : {make_equal_width_bins(1 + seed % 40), make_equal_mass_bins(1 + seed % 25, confs)}) {
        ++checked;
        if (!(ece_binned(data, scheme) <= mce(data, scheme))) ++order;
        if (std::abs(ece_binned(shuffled, scheme) - ece_binned(data, scheme)) > 1e-12) ++perm;
      }
      if (ece_exact(shuffled) != ece_exact(data)) ++perm;
      if (ece_binned(data, make_equal_width_bins(1)) != std::abs(hits.value() / n - conf.value() / n))
        ++collapse;
    }
    report("B6", order == 0 && collapse == 0 && perm == 0,
           fmt("%zu (dataset, scheme) pairs: %zu ece>mce, %zu B=1 collapse mismatches, %zu permutation "
               "mismatches",
               checked, order, collapse, perm));
  }

  {
    const auto audit = decomposition_audit();
    report("B3", audit.reports > 0 && audit.identity_failures == 0,
           fmt("%llu decomposition reports, %llu identity failures (zero tolerance)",
               static_cast<unsigned long long>(audit.reports),
               static_cast<unsigned long long>(audit.identity_failures)));
  }

  std::cout << (g_failures == 0 ? "all criteria passed" : std::to_string(g_failures) + " criteria failed")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
