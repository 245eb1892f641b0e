#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "calgap/error.hpp"

namespace calgap {

/// Neumaier's variant of Kahan summation. Adding the same values in the same
/// order always produces the same bits.
class CompensatedSum {
public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum &operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

enum class Split { Train, Test };

std::string_view to_string(Split split) noexcept;
std::optional<Split> parse_split(std::string_view text) noexcept;

/// One model output paired with its ground-truth label.
///
/// Binary predictions store the single value f(x) = P(y = 1) in `probs`;
/// multiclass predictions store the full probability vector.
struct PredictionRecord {
  int label = 0;
  std::vector<double> probs;
  std::optional<std::uint64_t> step;
  std::optional<Split> split;

  bool is_binary_form() const noexcept { return probs.size() == 1; }
  /// Probability assigned to class `c`; binary form expands to [1 - f, f].
  double prob(std::size_t c) const noexcept {
    if (probs.size() == 1)
      return c == 1 ? probs[0] : 1.0 - probs[0];
    return probs[c];
  }
  friend bool operator==(const PredictionRecord &, const PredictionRecord &) = default;
};

/// Checks the record invariants against a class count; throws ValidationError.
void validate_record(const PredictionRecord &record, std::size_t num_classes);

/// Ordered prediction records sharing one class count. Immutable once built.
class Dataset {
public:
  Dataset(std::vector<PredictionRecord> records, std::size_t num_classes);

  /// Infers the class count from the first record (binary form counts as 2).
  static Dataset from_records(std::vector<PredictionRecord> records);

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  std::size_t num_classes() const noexcept { return num_classes_; }
  bool is_binary() const noexcept { return num_classes_ == 2; }
  std::span<const PredictionRecord> records() const noexcept { return records_; }
  const PredictionRecord &operator[](std::size_t i) const { return records_[i]; }

private:
  std::vector<PredictionRecord> records_;
  std::size_t num_classes_;
};

enum class BinningKind { EqualWidth, EqualMass };

/// Partition of [0, 1] into confidence bins. Bins are half-open
/// [edges[i], edges[i+1]) except the last one, which is closed at 1.
class BinningScheme {
public:
  /// A single bin covering [0, 1].
  BinningScheme() : kind_(BinningKind::EqualWidth), edges_{0.0, 1.0}, requested_(1) {}

  BinningKind kind() const noexcept { return kind_; }
  std::span<const double> edges() const noexcept { return edges_; }
  std::size_t num_bins() const noexcept { return edges_.size() - 1; }
  /// Number of bins asked for; larger than num_bins() when ties collapsed edges.
  std::size_t requested_bins() const noexcept { return requested_; }
  bool degenerate() const noexcept { return num_bins() < requested_; }

  std::size_t assign(double confidence) const;

  friend BinningScheme make_equal_width_bins(std::size_t bins);
  friend BinningScheme make_equal_mass_bins(std::size_t bins,
                                            std::span<const double> confidences);

private:
  BinningScheme(BinningKind kind, std::vector<double> edges, std::size_t requested);

  BinningKind kind_;
  std::vector<double> edges_;
  std::size_t requested_;
};

inline constexpr std::size_t kDefaultBins = 15;

BinningScheme make_equal_width_bins(std::size_t bins);
BinningScheme make_equal_mass_bins(std::size_t bins, std::span<const double> confidences);

inline std::size_t assign_bin(const BinningScheme &scheme, double confidence) {
  return scheme.assign(confidence);
}

} // namespace calgap
