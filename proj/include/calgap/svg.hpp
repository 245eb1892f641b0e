#pragma once

#include <filesystem>
#include <string>

#include "calgap/metrics.hpp"

namespace calgap {

// Reliability diagram with the confidence histogram folded in: every bin gets
// an outlined bar up to its right edge (the perfectly calibrated reference)
// and, when occupied, a filled bar up to its empirical accuracy whose opacity
// is count / max count. The diagonal y = x is drawn for reference and the
// title carries the binned ECE and the sample count.

struct SvgLayout {
  double margin = 50.0;
  double plot_size = 300.0;

  double x(double confidence) const { return margin + confidence * plot_size; }
  double y(double value) const { return margin + (1.0 - value) * plot_size; }
};

std::string reliability_svg(const ReliabilityDiagram &diagram, const std::string &title,
                            const SvgLayout &layout = {});

/// Writes reliability_svg to `path`; throws IoError when it cannot be written.
void render_reliability_svg(const ReliabilityDiagram &diagram, const std::filesystem::path &path,
                            const std::string &title = "Reliability");

} // namespace calgap
