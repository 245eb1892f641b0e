#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "calgap/core.hpp"
#include "calgap/decomposition.hpp"
#include "calgap/synth.hpp"

namespace calgap {

// Prediction logs are JSON lines, one record per line:
//   {"split":"test","step":40,"label":1,"probs":[0.2,0.8]}
//   {"split":"train","step":40,"label":0,"conf":0.35}      (binary f = P(y=1))
// "split" defaults to "test" and "step" to 0 when absent.

struct LogGroup {
  Split split = Split::Test;
  std::uint64_t step = 0;
  Dataset data;
};

/// Groups ordered by (step, split) with train before test; records keep their
/// file order inside a group. Throws ParseError / ValidationError carrying the
/// 1-based line number.
std::vector<LogGroup> parse_log(std::istream &in);
std::vector<LogGroup> parse_log(const std::filesystem::path &path);

std::string format_log_record(const PredictionRecord &record);
void write_log(std::ostream &out, const Dataset &data);

// Trajectory CSV: step,train_error,test_error,train_ece,test_ece,error_gap,calib_gap
// Numbers carry 9 significant digits. The gap columns are recomputed from the
// rounded components, so they match their columns after re-parsing.

inline constexpr const char *kTrajectoryHeader =
    "step,train_error,test_error,train_ece,test_ece,error_gap,calib_gap";

std::string format_sig9(double value);
void write_trajectory(std::ostream &out, std::span<const TrajectoryPoint> trajectory);
void write_trajectory(const std::filesystem::path &path,
                      std::span<const TrajectoryPoint> trajectory);
std::vector<TrajectoryPoint> parse_trajectory(std::istream &in);
std::vector<TrajectoryPoint> parse_trajectory(const std::filesystem::path &path);

// Sampled datasets: CSV with header x0,...,x{d-1},y and 17 significant digits,
// which round-trips doubles exactly.
void write_samples(std::ostream &out, const Samples &samples);
Samples parse_samples(std::istream &in);

} // namespace calgap
