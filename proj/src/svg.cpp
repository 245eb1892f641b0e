#include "calgap/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace calgap {
namespace {

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape(const std::string &text) {
  std::string out;
  for (char c : text) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

} // namespace

std::string reliability_svg(const ReliabilityDiagram &diagram, const std::string &title,
                            const SvgLayout &layout) {
  const double size = 2.0 * layout.margin + layout.plot_size;
  std::size_t max_count = 0;
  for (const auto &bin : diagram.bins) max_count = std::max(max_count, bin.count);

  char summary[96];
  std::snprintf(summary, sizeof summary, "ECE = %.4f, n = %zu", diagram.ece(),
                diagram.total_count);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(size) << "\" height=\""
      << px(size) << "\" viewBox=\"0 0 " << px(size) << ' ' << px(size) << "\">\n";
  svg << "  <rect class=\"background\" x=\"0\" y=\"0\" width=\"" << px(size) << "\" height=\""
      << px(size) << "\" fill=\"white\"/>\n";
  svg << "  <text class=\"title\" x=\"" << px(size / 2) << "\" y=\"" << px(layout.margin / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << escape(title) << ": " << summary << "</text>\n";

  for (std::size_t b = 0; b < diagram.bins.size(); ++b) {
    const auto &bin = diagram.bins[b];
    const double left = layout.x(bin.lower);
    const double width = layout.x(bin.upper) - left;
    svg << "  <rect class=\"ideal\" data-bin=\"" << b << "\" x=\"" << px(left) << "\" y=\""
        << px(layout.y(bin.upper)) << "\" width=\"" << px(width) << "\" height=\""
        << px(bin.upper * layout.plot_size)
        << "\" fill=\"none\" stroke=\"#555555\" stroke-width=\"1\"/>\n";
    if (bin.empty()) continue;
    const double opacity =
        static_cast<double>(bin.count) / static_cast<double>(max_count);
    svg << "  <rect class=\"observed\" data-bin=\"" << b << "\" data-count=\"" << bin.count
        << "\" data-confidence=\"" << bin.mean_confidence << "\" x=\"" << px(left) << "\" y=\""
        << px(layout.y(bin.accuracy)) << "\" width=\"" << px(width) << "\" height=\""
        << px(bin.accuracy * layout.plot_size) << "\" fill=\"#1f77b4\" fill-opacity=\""
        << px(opacity) << "\"/>\n";
  }

  svg << "  <line class=\"diagonal\" x1=\"" << px(layout.x(0.0)) << "\" y1=\""
      << px(layout.y(0.0)) << "\" x2=\"" << px(layout.x(1.0)) << "\" y2=\"" << px(layout.y(1.0))
      << "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";
  svg << "  <line class=\"axis\" x1=\"" << px(layout.x(0.0)) << "\" y1=\"" << px(layout.y(0.0))
      << "\" x2=\"" << px(layout.x(1.0)) << "\" y2=\"" << px(layout.y(0.0))
      << "\" stroke=\"black\"/>\n";
  svg << "  <line class=\"axis\" x1=\"" << px(layout.x(0.0)) << "\" y1=\"" << px(layout.y(0.0))
      << "\" x2=\"" << px(layout.x(0.0)) << "\" y2=\"" << px(layout.y(1.0))
      << "\" stroke=\"black\"/>\n";
  svg << "  <text class=\"xlabel\" x=\"" << px(size / 2) << "\" y=\""
      << px(size - layout.margin / 3)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">confidence</text>\n";
  svg << "  <text class=\"ylabel\" x=\"" << px(layout.margin / 3) << "\" y=\"" << px(size / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 "
      << px(layout.margin / 3) << ' ' << px(size / 2) << ")\">accuracy</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void render_reliability_svg(const ReliabilityDiagram &diagram, const std::filesystem::path &path,
                            const std::string &title) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << reliability_svg(diagram, title);
  if (!out) fail(ErrorKind::IoError, "failed writing " + path.string());
}

} // namespace calgap
