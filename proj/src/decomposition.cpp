#include "calgap/decomposition.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "calgap/metrics.hpp"

namespace calgap {
namespace {

std::atomic<std::uint64_t> g_reports{0};
std::atomic<std::uint64_t> g_identity_failures{0};

} // namespace

double abs_diff_rounded_up(double a, double b) noexcept {
  const double hi = std::max(a, b);
  const double neg_lo = -std::min(a, b);
  // TwoSum: d + err == hi - lo exactly.
  const double d = hi + neg_lo;
  const double hi_part = d - neg_lo;
  const double err = (hi - hi_part) + (neg_lo - (d - hi_part));
  return err > 0.0 ? std::nextafter(d, std::numeric_limits<double>::infinity()) : d;
}

TrajectoryPoint make_trajectory_point(std::uint64_t step, double train_error,
                                      double test_error, double train_ece, double test_ece) {
  TrajectoryPoint p;
  p.step = step;
  p.train_error = train_error;
  p.test_error = test_error;
  p.train_ece = train_ece;
  p.test_ece = test_ece;
  p.error_gap = abs_diff_rounded_up(test_error, train_error);
  p.calib_gap = abs_diff_rounded_up(test_ece, train_ece);
  return p;
}

bool decomposition_identity_holds(const TrajectoryPoint &point) noexcept {
  return point.test_ece <= point.train_ece + point.calib_gap;
}

DecompositionAudit decomposition_audit() noexcept {
  return {g_reports.load(), g_identity_failures.load()};
}

TrajectoryPoint decomposition_report(const Dataset &train, const Dataset &test,
                                     const BinningScheme &scheme, std::uint64_t step) {
  if (train.empty()) fail(ErrorKind::EmptyInput, "train split has no records");
  if (test.empty()) fail(ErrorKind::EmptyInput, "test split has no records");
  if (train.num_classes() != test.num_classes())
    fail(ErrorKind::InvalidArgument,
         "train has " + std::to_string(train.num_classes()) + " classes, test has " +
             std::to_string(test.num_classes()));

  const auto point =
      make_trajectory_point(step, classification_error(train), classification_error(test),
                            ece_binned(train, scheme), ece_binned(test, scheme));
  ++g_reports;
  if (!decomposition_identity_holds(point)) {
    ++g_identity_failures;
    throw std::logic_error("decomposition identity violated at step " + std::to_string(step));
  }
  return point;
}

ClaimReport evaluate_claims(std::span<const TrajectoryPoint> trajectory, double tol,
                            double claim1_threshold) {
  if (trajectory.empty()) fail(ErrorKind::EmptyInput, "trajectory has no points");
  ClaimReport report;
  report.claim2_slack.reserve(trajectory.size());
  for (const auto &p : trajectory) {
    report.claim1_max_train_ece = std::max(report.claim1_max_train_ece, p.train_ece);
    if (p.train_ece > claim1_threshold) report.claim1_violations.push_back(p.step);
    report.claim2_slack.push_back(p.error_gap - p.calib_gap);
    if (p.calib_gap > p.error_gap + tol) report.violations.push_back(p.step);
  }
  report.claim2_holds_fraction =
      1.0 - static_cast<double>(report.violations.size()) / static_cast<double>(trajectory.size());
  return report;
}

LimitCheck interpolation_limit_check(const TrajectoryPoint &point, double tol) {
  if (point.train_error > kInterpolationGate) return LimitCheck::NotApplicable;
  return std::abs(point.test_ece - point.test_error) <= tol ? LimitCheck::Holds
                                                            : LimitCheck::Fails;
}

} // namespace calgap
