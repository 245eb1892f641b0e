#include "calgap/core.hpp"

#include <algorithm>
#include <string>

namespace calgap {

const char *to_string(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::InvalidArgument: return "invalid-argument";
  case ErrorKind::EmptyInput: return "empty-input";
  case ErrorKind::NotApplicable: return "not-applicable";
  case ErrorKind::ParseError: return "parse-error";
  case ErrorKind::ValidationError: return "validation-error";
  case ErrorKind::IoError: return "io-error";
  case ErrorKind::AbortRun: return "abort-run";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string &what, std::optional<std::size_t> line)
    : std::runtime_error(line ? std::string(to_string(kind)) + " at line " +
                                    std::to_string(*line) + ": " + what
                              : std::string(to_string(kind)) + ": " + what),
      kind_(kind), line_(line) {}

std::string_view to_string(Split split) noexcept {
  return split == Split::Train ? "train" : "test";
}

std::optional<Split> parse_split(std::string_view text) noexcept {
  if (text == "train") return Split::Train;
  if (text == "test") return Split::Test;
  return std::nullopt;
}

void validate_record(const PredictionRecord &record, std::size_t num_classes) {
  if (record.label < 0 || static_cast<std::size_t>(record.label) >= num_classes)
    fail(ErrorKind::ValidationError,
         "label " + std::to_string(record.label) + " outside [0, " +
             std::to_string(num_classes) + ")");
  const bool binary_form = record.probs.size() == 1 && num_classes == 2;
  if (!binary_form && record.probs.size() != num_classes)
    fail(ErrorKind::ValidationError,
         "expected " + std::to_string(num_classes) + " probabilities, got " +
             std::to_string(record.probs.size()));
  CompensatedSum total;
  for (double p : record.probs) {
    if (!(p >= 0.0 && p <= 1.0))
      fail(ErrorKind::ValidationError, "probability " + std::to_string(p) + " outside [0, 1]");
    total += p;
  }
  if (!binary_form && std::abs(total.value() - 1.0) > 1e-9)
    fail(ErrorKind::ValidationError,
         "probabilities sum to " + std::to_string(total.value()) + ", expected 1");
}

Dataset::Dataset(std::vector<PredictionRecord> records, std::size_t num_classes)
    : records_(std::move(records)), num_classes_(num_classes) {
  if (num_classes_ < 2)
    fail(ErrorKind::InvalidArgument, "a dataset needs at least 2 classes");
  for (const auto &r : records_) validate_record(r, num_classes_);
}

Dataset Dataset::from_records(std::vector<PredictionRecord> records) {
  std::size_t classes = 2;
  if (!records.empty() && records.front().probs.size() > 1)
    classes = records.front().probs.size();
  return Dataset(std::move(records), classes);
}

BinningScheme::BinningScheme(BinningKind kind, std::vector<double> edges, std::size_t requested)
    : kind_(kind), edges_(std::move(edges)), requested_(requested) {}

std::size_t BinningScheme::assign(double confidence) const {
  if (!(confidence >= 0.0 && confidence <= 1.0))
    fail(ErrorKind::InvalidArgument,
         "confidence " + std::to_string(confidence) + " outside [0, 1]");
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), confidence);
  const auto idx = static_cast<std::size_t>(it - edges_.begin());
  // idx == edges_.size() only for confidence == 1, which belongs to the last bin.
  return std::min(idx, edges_.size() - 1) - 1;
}

BinningScheme make_equal_width_bins(std::size_t bins) {
  if (bins == 0) fail(ErrorKind::InvalidArgument, "bin count must be positive");
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    edges[i] = static_cast<double>(i) / static_cast<double>(bins);
  return BinningScheme(BinningKind::EqualWidth, std::move(edges), bins);
}

BinningScheme make_equal_mass_bins(std::size_t bins, std::span<const double> confidences) {
  if (bins == 0) fail(ErrorKind::InvalidArgument, "bin count must be positive");
  if (confidences.empty())
    fail(ErrorKind::InvalidArgument, "equal-mass binning needs at least one confidence");
  std::vector<double> sorted(confidences.begin(), confidences.end());
  for (double c : sorted)
    if (!(c >= 0.0 && c <= 1.0))
      fail(ErrorKind::InvalidArgument, "confidence " + std::to_string(c) + " outside [0, 1]");
  std::sort(sorted.begin(), sorted.end());

  const std::size_t n = sorted.size();
  const std::size_t groups = std::min(bins, n);
  const std::size_t base = n / groups;
  const std::size_t extra = n % groups;

  std::vector<double> edges{0.0};
  std::size_t boundary = 0;
  for (std::size_t g = 0; g + 1 < groups; ++g) {
    boundary += base + (g < extra ? 1 : 0);
    const double lo = sorted[boundary - 1];
    const double hi = sorted[boundary];
    if (lo == hi) continue; // a tie cannot be split; the edge collapses
    double edge = (lo + hi) / 2.0;
    if (edge <= lo) edge = hi;
    edge = std::clamp(edge, 0.0, 1.0);
    if (edge <= edges.back() || edge >= 1.0) continue;
    edges.push_back(edge);
  }
  edges.push_back(1.0);
  return BinningScheme(BinningKind::EqualMass, std::move(edges), bins);
}

} // namespace calgap
