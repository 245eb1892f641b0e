#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "calgap/core.hpp"

namespace calgap {

/// One checkpoint of a training run: train/test error and ECE plus both
/// generalization gaps.
struct TrajectoryPoint {
  std::uint64_t step = 0;
  double train_error = 0.0;
  double test_error = 0.0;
  double train_ece = 0.0;
  double test_ece = 0.0;
  double error_gap = 0.0; // |test_error - train_error|, rounded up
  double calib_gap = 0.0; // |test_ece - train_ece|, rounded up

  friend bool operator==(const TrajectoryPoint &, const TrajectoryPoint &) = default;
};

/// |a - b| rounded toward +infinity. A round-to-nearest gap can land one ulp
/// short, which would break min(a, b) + gap >= max(a, b) in floating point.
double abs_diff_rounded_up(double a, double b) noexcept;

/// Builds a point from its four base quantities; the gaps are derived here.
TrajectoryPoint make_trajectory_point(std::uint64_t step, double train_error,
                                      double test_error, double train_ece, double test_ece);

/// TestECE <= TrainECE + |TestECE - TrainECE|, evaluated with no tolerance.
bool decomposition_identity_holds(const TrajectoryPoint &point) noexcept;

/// Test calibration error split into train calibration error plus the
/// calibration generalization gap. ECE is the binned estimator under `scheme`.
/// Throws EmptyInput for an empty split and InvalidArgument when the class
/// counts differ.
TrajectoryPoint decomposition_report(const Dataset &train, const Dataset &test,
                                     const BinningScheme &scheme, std::uint64_t step = 0);

struct DecompositionAudit {
  std::uint64_t reports = 0;
  std::uint64_t identity_failures = 0;
};

/// Process-wide tally of every decomposition_report produced so far.
DecompositionAudit decomposition_audit() noexcept;

inline constexpr double kClaim1Threshold = 0.05;
inline constexpr double kClaim2Tolerance = 0.02;
inline constexpr double kInterpolationGate = 0.005;

struct ClaimReport {
  double claim1_max_train_ece = 0.0;
  /// Steps whose train ECE exceeds the claim-1 threshold.
  std::vector<std::uint64_t> claim1_violations;
  double claim2_holds_fraction = 0.0;
  /// error_gap - calib_gap per point, in trajectory order.
  std::vector<double> claim2_slack;
  /// Steps where calib_gap > error_gap + tol.
  std::vector<std::uint64_t> violations;
};

/// Reports (never asserts) whether the train-calibration and calibration-gap
/// claims hold along a trajectory.
ClaimReport evaluate_claims(std::span<const TrajectoryPoint> trajectory,
                            double tol = kClaim2Tolerance,
                            double claim1_threshold = kClaim1Threshold);

enum class LimitCheck { Holds, Fails, NotApplicable };

/// For an interpolating checkpoint (train_error <= 0.005) tests whether the
/// test ECE has reached the test error within `tol`.
LimitCheck interpolation_limit_check(const TrajectoryPoint &point, double tol);

} // namespace calgap
