#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "calgap/core.hpp"

namespace calgap {

/// A (confidence, outcome) pair fed to the binning estimators. In the binary
/// case confidence is f(x) and outcome is y; for multiclass data it is the
/// top-label probability and whether the argmax was correct.
struct ConfidencePair {
  double confidence;
  double outcome;
};

/// Reduces a dataset to confidence pairs (binary: f and y; multiclass: top label).
std::vector<ConfidencePair> confidence_pairs(const Dataset &data);

/// Predicted class: binary predicts 1 iff f > 0.5; multiclass takes the first argmax.
int predicted_class(const PredictionRecord &record);

struct ReliabilityBin {
  double lower = 0.0;
  double upper = 0.0;
  double mean_confidence = 0.0; // NaN when the bin is empty
  double accuracy = 0.0;        // NaN when the bin is empty
  std::size_t count = 0;

  bool empty() const noexcept { return count == 0; }
};

struct ReliabilityDiagram {
  std::vector<ReliabilityBin> bins;
  std::size_t total_count = 0;
  BinningScheme scheme;

  /// Sum over nonempty bins of (count / n) * |accuracy - confidence|.
  double ece() const;
  /// Largest |accuracy - confidence| over nonempty bins.
  double mce() const;
};

ReliabilityDiagram reliability(const Dataset &data, const BinningScheme &scheme);
ReliabilityDiagram reliability(std::span<const ConfidencePair> pairs,
                               const BinningScheme &scheme);

double ece_binned(const Dataset &data, const BinningScheme &scheme);
/// Binning-free ECE of the empirical distribution: records are grouped by their
/// exact confidence value.
double ece_exact(const Dataset &data);
double mce(const Dataset &data, const BinningScheme &scheme);
/// Mean over records of sum_c (p_c - onehot_c)^2, so values lie in [0, 2].
double brier(const Dataset &data);
/// Classwise calibration error: every class column is binned with `scheme`
/// and the per-class binned ECEs are averaged.
double sce(const Dataset &data, const BinningScheme &scheme);

struct AceResult {
  double value = 0.0;
  /// True when ties forced some class column to use fewer than the requested bins.
  bool degenerate = false;
};

/// As sce, but each class column gets its own equal-mass binning.
AceResult ace(const Dataset &data, std::size_t bins);

double classification_error(const Dataset &data);
bool is_perfectly_calibrated(const Dataset &data, double tol);

struct MetricsReport {
  double ece_binned = 0.0;
  double ece_exact = 0.0;
  double mce = 0.0;
  double brier = 0.0;
  double sce = 0.0;
  double ace = 0.0;
  bool ace_degenerate = false;
  double error = 0.0;
  ReliabilityDiagram diagram;
};

/// Computes every metric in one pass over the shared reliability diagram.
/// `scheme` drives ECE/MCE/SCE; `ace_bins` is the bin count for ACE.
MetricsReport compute_metrics(const Dataset &data, const BinningScheme &scheme,
                              std::size_t ace_bins);

} // namespace calgap
