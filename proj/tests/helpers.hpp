#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "calgap/core.hpp"
#include "calgap/rng.hpp"

namespace testing_support {

inline calgap::Dataset binary(std::vector<std::pair<double, int>> rows) {
  std::vector<calgap::PredictionRecord> records;
  for (auto [f, y] : rows) records.push_back({y, {f}});
  return calgap::Dataset(std::move(records), 2);
}

// Random dataset of n records over C classes. Binary data stores f; about a
// third of the binary suites snap f to a coarse grid so that ties and values
// sitting exactly on bin edges are exercised.
inline calgap::Dataset random_dataset(std::uint64_t seed, std::size_t n, std::size_t classes) {
  calgap::CounterRng rng(seed, 77);
  const double scale = 0.5 + 4.0 * rng.uniform();
  const bool snap = rng.below(3) == 0;
  std::vector<calgap::PredictionRecord> records(n);
  for (auto &r : records) {
    if (classes == 2) {
      double f = rng.uniform();
      if (snap) f = std::round(f * 20.0) / 20.0;
      r.probs = {f};
      r.label = rng.uniform() < f ? 1 : 0;
      if (rng.below(4) == 0) r.label = 1 - r.label;
      continue;
    }
    std::vector<double> z(classes);
    double top = -1e300;
    for (auto &v : z) {
      v = scale * rng.normal();
      top = std::max(top, v);
    }
    double total = 0.0;
    for (auto &v : z) total += (v = std::exp(v - top));
    for (auto &v : z) v /= total;
    r.probs = z;
    r.label = static_cast<int>(rng.below(classes));
  }
  return calgap::Dataset(std::move(records), classes);
}

inline calgap::Dataset permuted(const calgap::Dataset &d, std::uint64_t seed) {
  std::vector<calgap::PredictionRecord> records(d.records().begin(), d.records().end());
  calgap::CounterRng rng(seed, 5);
  for (std::size_t i = records.size(); i > 1; --i) std::swap(records[i - 1], records[rng.below(i)]);
  return calgap::Dataset(std::move(records), d.num_classes());
}

// Applies the class permutation c -> perm[c] to labels and probability columns.
inline calgap::Dataset relabeled(const calgap::Dataset &d, const std::vector<std::size_t> &perm) {
  std::vector<calgap::PredictionRecord> records;
  for (const auto &r : d.records()) {
    calgap::PredictionRecord out;
    out.label = static_cast<int>(perm[static_cast<std::size_t>(r.label)]);
    out.probs.assign(d.num_classes(), 0.0);
    for (std::size_t c = 0; c < d.num_classes(); ++c) out.probs[perm[c]] = r.prob(c);
    records.push_back(std::move(out));
  }
  return calgap::Dataset(std::move(records), d.num_classes());
}

} // namespace testing_support
