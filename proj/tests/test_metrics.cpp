#include <doctest.h>

#include <cmath>
#include <numeric>

#include "calgap/error.hpp"
#include "calgap/metrics.hpp"
#include "calgap/synth.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace calgap;
using testing_support::binary;
using testing_support::random_dataset;

namespace {

const auto kFour = [] { return binary({{0.9, 1}, {0.9, 0}, {0.2, 0}, {0.2, 0}}); };

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("reliability aggregates per bin") {
  const auto d = reliability(binary({{0.9, 1}, {0.9, 0}}), make_equal_width_bins(10));
  REQUIRE(d.bins.size() == 10);
  CHECK(d.bins[9].count == 2);
  CHECK(d.bins[9].mean_confidence == doctest::Approx(0.9));
  CHECK(d.bins[9].accuracy == 0.5);
  CHECK(d.total_count == 2);
  for (std::size_t b = 0; b < 9; ++b) {
    CHECK(d.bins[b].empty());
    CHECK(std::isnan(d.bins[b].accuracy));
  }

  const auto perfect = reliability(binary({{1.0, 1}, {1.0, 1}, {1.0, 1}}), make_equal_width_bins(7));
  CHECK(perfect.bins.back().accuracy == 1.0);
  CHECK(perfect.bins.back().mean_confidence == 1.0);

  const auto gaps = reliability(binary({{0.05, 0}, {0.95, 1}}), make_equal_width_bins(10));
  CHECK(gaps.bins[0].count == 1);
  CHECK(gaps.bins[9].count == 1);
  for (std::size_t b = 1; b < 9; ++b) CHECK(gaps.bins[b].count == 0);

  CHECK_THROWS_AS(reliability(Dataset({}, 2), make_equal_width_bins(3)), Error);
}

TEST_CASE("reliability diagram invariants on random data") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto data = random_dataset(seed, 1 + seed * 13, seed % 2 ? 10 : 2);
    const auto diagram = reliability(data, make_equal_width_bins(1 + seed % 20));
    std::size_t total = 0;
    for (const auto &b : diagram.bins) {
      total += b.count;
      if (b.empty()) continue;
      CHECK(b.lower <= b.mean_confidence);
      CHECK(b.mean_confidence <= b.upper);
    }
    CHECK(total == diagram.total_count);
  }
}

TEST_CASE("ece_binned examples") {
  const auto scheme = make_equal_width_bins(10);
  // 0.5 * |0.5 - 0.9| + 0.5 * |0 - 0.2|
  CHECK(ece_binned(kFour(), scheme) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(ece_binned(binary({{0.5, 1}, {0.5, 0}, {0.5, 1}, {0.5, 0}}), scheme) == 0.0);
  CHECK(ece_binned(binary({{1.0, 1}, {1.0, 1}}), scheme) == 0.0);
  try {
    ece_binned(Dataset({}, 2), scheme);
    FAIL("expected empty-input");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::EmptyInput);
  }
}

TEST_CASE("ece_exact examples") {
  CHECK(ece_exact(binary({{0.5, 1}, {0.5, 0}})) == 0.0);
  CHECK(ece_exact(kFour()) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(ece_exact(binary({{0.7, 1}})) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(ece_exact(Dataset({}, 2)), Error);
}

TEST_CASE("mce examples") {
  const auto scheme = make_equal_width_bins(10);
  CHECK(mce(kFour(), scheme) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(mce(binary({{1.0, 1}, {0.0, 0}}), scheme) == 0.0);
  CHECK(mce(binary({{0.6, 0}}), scheme) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("brier examples") {
  CHECK(brier(Dataset({{1, {0.1, 0.9}}}, 2)) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(brier(binary({{0.9, 1}})) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(brier(Dataset({{2, {0.0, 0.0, 1.0}}}, 3)) == 0.0);
  CHECK(brier(Dataset({{0, {0.5, 0.5}}, {1, {0.5, 0.5}}}, 2)) == 0.5);
  // Worst case reaches the top of the [0, 2] range.
  CHECK(brier(binary({{1.0, 0}})) == 2.0);
}

TEST_CASE("sce examples") {
  const auto scheme = make_equal_width_bins(10);
  CHECK(sce(Dataset({{1, {0.5, 0.5}}}, 2), scheme) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sce(Dataset({{0, {1.0, 0.0, 0.0}}, {2, {0.0, 0.0, 1.0}}}, 3), scheme) == 0.0);

  // Binary: mean of the ECE on f and on 1 - f.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto data = random_dataset(seed, 200, 2);
    std::vector<PredictionRecord> flipped;
    for (const auto &r : data.records()) flipped.push_back({1 - r.label, {1.0 - r.probs[0]}});
    const double expected =
        0.5 * (ece_binned(data, scheme) + ece_binned(Dataset(flipped, 2), scheme));
    CHECK(sce(data, scheme) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("ace examples") {
  CHECK(ace(Dataset({{0, {1.0, 0.0, 0.0}}, {2, {0.0, 0.0, 1.0}}, {1, {0.0, 1.0, 0.0}}}, 3), 5).value == 0.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto data = random_dataset(seed, 50 + seed, seed % 2 ? 10 : 2);
    CHECK(ace(data, 1).value == doctest::Approx(sce(data, make_equal_width_bins(1))).epsilon(1e-12));
  }
  // Five records cannot fill eight bins in any column.
  const auto small = random_dataset(3, 5, 10);
  CHECK(ace(small, 8).degenerate);
}

TEST_CASE("classification error") {
  CHECK(classification_error(binary({{0.9, 1}, {0.2, 0}})) == 0.0);
  CHECK(classification_error(binary({{0.9, 0}})) == 1.0);
  CHECK(classification_error(binary({{0.5, 1}})) == 1.0);
  CHECK(classification_error(binary({{0.5, 0}})) == 0.0);
  CHECK(classification_error(Dataset({{1, {0.2, 0.5, 0.3}}, {0, {0.2, 0.5, 0.3}}}, 3)) == 0.5);
}

TEST_CASE("is_perfectly_calibrated") {
  CHECK(is_perfectly_calibrated(binary({{0.5, 1}, {0.5, 0}}), 1e-12));
  CHECK_FALSE(is_perfectly_calibrated(binary({{0.9, 0}}), 0.1));
  const auto task = default_binary_task();
  const auto bayes = bayes_predictions(task, sample(task, 50000, 11));
  // Exact grouping on continuous confidences degenerates to singletons, so the
  // statistical check goes through the binned estimator.
  const auto scheme = make_equal_width_bins(kDefaultBins);
  const auto diagram = reliability(bayes, scheme);
  CHECK(diagram.ece() <= 0.05);
}

TEST_CASE("multiclass uses the top label") {
  const Dataset d({{1, {0.1, 0.7, 0.2}}, {0, {0.1, 0.7, 0.2}}}, 3);
  const auto pairs = confidence_pairs(d);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].confidence == 0.7);
  CHECK(pairs[0].outcome == 1.0);
  CHECK(pairs[1].outcome == 0.0);
  CHECK(ece_binned(d, make_equal_width_bins(10)) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("compute_metrics matches the individual functions") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto data = random_dataset(seed, 300, seed % 2 ? 10 : 2);
    const auto scheme = make_equal_width_bins(15);
    const auto r = compute_metrics(data, scheme, 15);
    CHECK(r.ece_binned == ece_binned(data, scheme));
    CHECK(r.ece_exact == ece_exact(data));
    CHECK(r.mce == mce(data, scheme));
    CHECK(r.brier == brier(data));
    CHECK(r.sce == sce(data, scheme));
    CHECK(r.ace == ace(data, 15).value);
    CHECK(r.error == classification_error(data));
    for (double v : {r.ece_binned, r.ece_exact, r.mce, r.sce, r.ace, r.error}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(r.brier <= 2.0);
  }
}

TEST_CASE("oracle: binned ECE, SCE and ACE match naive double loops") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t classes = seed % 2 ? 10 : 2;
    CounterRng rng(seed, 99);
    const std::size_t n = 1 + rng.below(1000);
    const std::size_t bins = 1 + rng.below(30);
    const auto data = random_dataset(seed, n, classes);
    const auto edges = oracle::uniform_edges(bins);
    const auto scheme = make_equal_width_bins(bins);
    CHECK(std::abs(ece_binned(data, scheme) - oracle::binned_ece(oracle::top_label(data), edges)) <= 1e-12);
    CHECK(std::abs(sce(data, scheme) - oracle::sce(data, edges)) <= 1e-12);
    CHECK(std::abs(ace(data, bins).value - oracle::ace(data, bins)) <= 1e-12);
  }
}

TEST_CASE("property: ece_binned <= mce and B = 1 collapse") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto data = random_dataset(seed, 1 + seed % 257, seed % 3 ? 2 : 10);
    for (std::size_t bins : {1u, 2u, 7u, 15u, 64u}) {
      const auto scheme = make_equal_width_bins(bins);
      CHECK(ece_binned(data, scheme) <= mce(data, scheme));
    }
    std::vector<double> confs;
    for (const auto &p : confidence_pairs(data)) confs.push_back(p.confidence);
    const auto mass = make_equal_mass_bins(9, confs);
    CHECK(ece_binned(data, mass) <= mce(data, mass));

    CompensatedSum conf, hits;
    for (const auto &p : confidence_pairs(data)) {
      conf += p.confidence;
      hits += p.outcome;
    }
    const double n = static_cast<double>(data.size());
    CHECK(ece_binned(data, make_equal_width_bins(1)) == std::abs(hits.value() / n - conf.value() / n));
  }
}

TEST_CASE("property: permutation invariance") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto data = random_dataset(seed, 1 + seed * 5, seed % 2 ? 10 : 2);
    const auto shuffled = testing_support::permuted(data, seed + 1000);
    const auto scheme = make_equal_width_bins(15);
    CHECK(ece_exact(shuffled) == ece_exact(data));
    CHECK(std::abs(ece_binned(shuffled, scheme) - ece_binned(data, scheme)) <= 1e-12);
    CHECK(mce(shuffled, scheme) == doctest::Approx(mce(data, scheme)).epsilon(1e-12));
  }
}

TEST_CASE("property: class relabeling invariance") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t classes = seed % 2 ? 10 : 2;
    const auto data = random_dataset(seed, 50 + seed * 3, classes);
    std::vector<std::size_t> perm(classes);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    CounterRng rng(seed, 3);
    for (std::size_t i = classes; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    const auto moved = testing_support::relabeled(data, perm);
    const auto scheme = make_equal_width_bins(15);
    CHECK(std::abs(brier(moved) - brier(data)) <= 1e-12);
    CHECK(std::abs(sce(moved, scheme) - sce(data, scheme)) <= 1e-12);
    CHECK(std::abs(ace(moved, 15).value - ace(data, 15).value) <= 1e-12);
    // Binary relabeling turns f = 0.5 into a tie in the other direction.
    bool has_tie = false;
    for (const auto &r : data.records()) has_tie = has_tie || (classes == 2 && r.probs[0] == 0.5);
    if (!has_tie) CHECK(classification_error(moved) == classification_error(data));
  }
}

TEST_CASE("property: confidences equal to group label means give zero exact ECE") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CounterRng rng(seed, 8);
    std::vector<std::pair<double, int>> rows;
    const std::size_t groups = 1 + rng.below(10);
    for (std::size_t g = 0; g < groups; ++g) {
      const std::size_t size = 1 + rng.below(8);
      const std::size_t ones = rng.below(size + 1);
      // k/size is exactly the mean of k ones among size labels.
      const double level = static_cast<double>(ones) / static_cast<double>(size);
      for (std::size_t i = 0; i < size; ++i) rows.push_back({level, i < ones ? 1 : 0});
    }
    // Groups sharing a level (e.g. 1/2 and 2/4) merge and stay calibrated.
    CHECK(ece_exact(binary(rows)) == 0.0);
  }
}

}
