#pragma once

// Deliberately naive reference implementations: plain loops, plain sums, no
// shared code with the library beyond the record accessors.

#include <cmath>
#include <cstddef>
#include <vector>

#include "calgap/core.hpp"

namespace oracle {

// Linear scan over the edges with the half-open / closed-last convention.
inline std::size_t bin_of(const std::vector<double> &edges, double c) {
  const std::size_t nbins = edges.size() - 1;
  for (std::size_t b = 0; b + 1 < nbins; ++b)
    if (c >= edges[b] && c < edges[b + 1]) return b;
  return nbins - 1;
}

struct Pair {
  double conf;
  double hit;
};

inline std::vector<Pair> top_label(const calgap::Dataset &data) {
  std::vector<Pair> out;
  for (const auto &r : data.records()) {
    if (data.num_classes() == 2) {
      out.push_back({r.prob(1), static_cast<double>(r.label)});
      continue;
    }
    std::size_t arg = 0;
    for (std::size_t c = 1; c < data.num_classes(); ++c)
      if (r.prob(c) > r.prob(arg)) arg = c;
    out.push_back({r.prob(arg), static_cast<int>(arg) == r.label ? 1.0 : 0.0});
  }
  return out;
}

inline std::vector<Pair> column(const calgap::Dataset &data, std::size_t c) {
  std::vector<Pair> out;
  for (const auto &r : data.records())
    out.push_back({r.prob(c), r.label == static_cast<int>(c) ? 1.0 : 0.0});
  return out;
}

// For every bin, walk every record again.
inline double binned_ece(const std::vector<Pair> &pairs, const std::vector<double> &edges) {
  double total = 0.0;
  const double n = static_cast<double>(pairs.size());
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    double conf = 0.0, hit = 0.0, count = 0.0;
    for (const auto &p : pairs) {
      if (bin_of(edges, p.conf) != b) continue;
      conf += p.conf;
      hit += p.hit;
      count += 1.0;
    }
    if (count > 0.0) total += count / n * std::abs(hit / count - conf / count);
  }
  return total;
}

inline std::vector<double> uniform_edges(std::size_t bins) {
  std::vector<double> e(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) e[i] = static_cast<double>(i) / static_cast<double>(bins);
  return e;
}

inline double sce(const calgap::Dataset &data, const std::vector<double> &edges) {
  double total = 0.0;
  for (std::size_t c = 0; c < data.num_classes(); ++c) total += binned_ece(column(data, c), edges);
  return total / static_cast<double>(data.num_classes());
}

inline double ace(const calgap::Dataset &data, std::size_t bins) {
  double total = 0.0;
  for (std::size_t c = 0; c < data.num_classes(); ++c) {
    auto col = column(data, c);
    // Adaptive bins: equal counts by rank, computed directly on the sorted column.
    std::vector<double> sorted;
    for (const auto &p : col) sorted.push_back(p.conf);
    for (std::size_t i = 0; i < sorted.size(); ++i)
      for (std::size_t j = i + 1; j < sorted.size(); ++j)
        if (sorted[j] < sorted[i]) std::swap(sorted[i], sorted[j]);
    const std::size_t n = sorted.size();
    const std::size_t groups = bins < n ? bins : n;
    std::vector<double> edges{0.0};
    std::size_t end = 0;
    for (std::size_t g = 0; g + 1 < groups; ++g) {
      end += n / groups + (g < n % groups ? 1 : 0);
      const double lo = sorted[end - 1], hi = sorted[end];
      if (lo == hi) continue;
      const double e = (lo + hi) / 2;
      if (e > edges.back() && e < 1.0) edges.push_back(e);
    }
    edges.push_back(1.0);
    total += binned_ece(col, edges);
  }
  return total / static_cast<double>(data.num_classes());
}

} // namespace oracle
