#include "calgap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace calgap {
namespace {

void require_nonempty(const Dataset &data) {
  if (data.empty()) fail(ErrorKind::EmptyInput, "dataset has no records");
}

// Column of class-c probabilities paired with the indicator y == c.
std::vector<ConfidencePair> class_column(const Dataset &data, std::size_t c) {
  std::vector<ConfidencePair> column;
  column.reserve(data.size());
  for (const auto &r : data.records())
    column.push_back({r.prob(c), r.label == static_cast<int>(c) ? 1.0 : 0.0});
  return column;
}

} // namespace

int predicted_class(const PredictionRecord &record) {
  if (record.is_binary_form()) return record.probs[0] > 0.5 ? 1 : 0;
  const auto it = std::max_element(record.probs.begin(), record.probs.end());
  return static_cast<int>(it - record.probs.begin());
}

std::vector<ConfidencePair> confidence_pairs(const Dataset &data) {
  std::vector<ConfidencePair> pairs;
  pairs.reserve(data.size());
  for (const auto &r : data.records()) {
    if (data.is_binary()) {
      pairs.push_back({r.prob(1), static_cast<double>(r.label)});
    } else {
      const int top = predicted_class(r);
      pairs.push_back({r.probs[static_cast<std::size_t>(top)], top == r.label ? 1.0 : 0.0});
    }
  }
  return pairs;
}

ReliabilityDiagram reliability(std::span<const ConfidencePair> pairs,
                               const BinningScheme &scheme) {
  if (pairs.empty()) fail(ErrorKind::EmptyInput, "no confidences to bin");
  const std::size_t nbins = scheme.num_bins();
  std::vector<CompensatedSum> conf(nbins), hits(nbins);
  std::vector<std::size_t> counts(nbins, 0);
  for (const auto &p : pairs) {
    const std::size_t b = scheme.assign(p.confidence);
    conf[b] += p.confidence;
    hits[b] += p.outcome;
    ++counts[b];
  }

  ReliabilityDiagram diagram{{}, pairs.size(), scheme};
  diagram.bins.resize(nbins);
  const auto edges = scheme.edges();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t b = 0; b < nbins; ++b) {
    auto &bin = diagram.bins[b];
    bin.lower = edges[b];
    bin.upper = edges[b + 1];
    bin.count = counts[b];
    if (bin.count == 0) {
      bin.mean_confidence = nan;
      bin.accuracy = nan;
      continue;
    }
    const auto n = static_cast<double>(bin.count);
    // The mean of values in [lo, hi] can round a hair outside the interval.
    bin.mean_confidence = std::clamp(conf[b].value() / n, bin.lower, bin.upper);
    bin.accuracy = hits[b].value() / n;
  }
  return diagram;
}

ReliabilityDiagram reliability(const Dataset &data, const BinningScheme &scheme) {
  require_nonempty(data);
  const auto pairs = confidence_pairs(data);
  return reliability(pairs, scheme);
}

double ReliabilityDiagram::mce() const {
  double worst = 0.0;
  for (const auto &bin : bins)
    if (!bin.empty()) worst = std::max(worst, std::abs(bin.accuracy - bin.mean_confidence));
  return worst;
}

double ReliabilityDiagram::ece() const {
  CompensatedSum total;
  const auto n = static_cast<double>(total_count);
  for (const auto &bin : bins) {
    if (bin.empty()) continue;
    total += (static_cast<double>(bin.count) / n) * std::abs(bin.accuracy - bin.mean_confidence);
  }
  // A weighted mean never exceeds the largest term; this only absorbs rounding.
  return std::min(total.value(), mce());
}

double ece_binned(const Dataset &data, const BinningScheme &scheme) {
  return reliability(data, scheme).ece();
}

double mce(const Dataset &data, const BinningScheme &scheme) {
  return reliability(data, scheme).mce();
}

double ece_exact(const Dataset &data) {
  require_nonempty(data);
  auto pairs = confidence_pairs(data);
  // Canonical order makes the result independent of record order, bit for bit.
  std::sort(pairs.begin(), pairs.end(), [](const auto &a, const auto &b) {
    return a.confidence < b.confidence ||
           (a.confidence == b.confidence && a.outcome < b.outcome);
  });
  const auto n = static_cast<double>(pairs.size());
  CompensatedSum total;
  for (std::size_t i = 0; i < pairs.size();) {
    const double level = pairs[i].confidence;
    CompensatedSum hits;
    std::size_t j = i;
    for (; j < pairs.size() && pairs[j].confidence == level; ++j) hits += pairs[j].outcome;
    const auto count = static_cast<double>(j - i);
    total += (count / n) * std::abs(hits.value() / count - level);
    i = j;
  }
  return total.value();
}

double brier(const Dataset &data) {
  require_nonempty(data);
  CompensatedSum total;
  for (const auto &r : data.records()) {
    for (std::size_t c = 0; c < data.num_classes(); ++c) {
      const double target = r.label == static_cast<int>(c) ? 1.0 : 0.0;
      const double d = r.prob(c) - target;
      total += d * d;
    }
  }
  return total.value() / static_cast<double>(data.size());
}

double sce(const Dataset &data, const BinningScheme &scheme) {
  require_nonempty(data);
  CompensatedSum total;
  for (std::size_t c = 0; c < data.num_classes(); ++c) {
    const auto column = class_column(data, c);
    total += reliability(column, scheme).ece();
  }
  return total.value() / static_cast<double>(data.num_classes());
}

AceResult ace(const Dataset &data, std::size_t bins) {
  require_nonempty(data);
  AceResult result;
  CompensatedSum total;
  std::vector<double> probs(data.size());
  for (std::size_t c = 0; c < data.num_classes(); ++c) {
    const auto column = class_column(data, c);
    std::transform(column.begin(), column.end(), probs.begin(),
                   [](const ConfidencePair &p) { return p.confidence; });
    const auto scheme = make_equal_mass_bins(bins, probs);
    result.degenerate = result.degenerate || scheme.degenerate();
    total += reliability(column, scheme).ece();
  }
  result.value = total.value() / static_cast<double>(data.num_classes());
  return result;
}

double classification_error(const Dataset &data) {
  require_nonempty(data);
  std::size_t wrong = 0;
  for (const auto &r : data.records())
    if (predicted_class(r) != r.label) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

bool is_perfectly_calibrated(const Dataset &data, double tol) {
  return ece_exact(data) <= tol;
}

MetricsReport compute_metrics(const Dataset &data, const BinningScheme &scheme,
                              std::size_t ace_bins) {
  MetricsReport report;
  report.diagram = reliability(data, scheme);
  report.ece_binned = report.diagram.ece();
  report.mce = report.diagram.mce();
  report.ece_exact = ece_exact(data);
  report.brier = brier(data);
  report.sce = sce(data, scheme);
  const auto adaptive = ace(data, ace_bins);
  report.ace = adaptive.value;
  report.ace_degenerate = adaptive.degenerate;
  report.error = classification_error(data);
  return report;
}

} // namespace calgap
