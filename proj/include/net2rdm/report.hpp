#pragma once

#include <optional>
#include <string>
#include <vector>

#include "net2rdm/core_model.hpp"
#include "net2rdm/wrsa.hpp"

namespace net2rdm {

struct ReportBar {
  std::string model;
  std::string layer;
  double mean_score = 0.0;
  std::optional<double> sem;
  bool significant = false;
};

struct ReportSpec {
  std::string title;
  std::string axis_label = "signed r²";
  std::vector<ReportBar> bars;  // consecutive bars with the same model form a group
  std::optional<NoiseCeiling> noise_ceiling;
  std::vector<std::string> notes;  // free text lines under the plot
};

/// Fixed layout of the 960x480 canvas.
struct ReportLayout {
  static constexpr double width = 960.0;
  static constexpr double height = 480.0;
  static constexpr double plot_left = 80.0;
  static constexpr double plot_right = 940.0;
  static constexpr double plot_top = 50.0;
  static constexpr double plot_bottom = 340.0;
};

/// Linear value -> pixel mapping of the y axis. The data range runs from
/// min(0, lowest bar - sem) to max(upper ceiling, highest bar + sem) and is
/// padded by 5% of its span on both ends.
struct AxisTransform {
  double lo = 0.0;
  double hi = 1.0;

  double to_pixel(double value) const noexcept;
  double to_value(double pixel) const noexcept;
};

AxisTransform axis_for(const ReportSpec& spec);

/// Deterministic SVG text; throws Error(EmptyInput) when there are no bars.
std::string render_report(const ReportSpec& spec);

ReportSpec report_from_results(const std::string& title, const std::vector<EvaluationResult>& results);
ReportSpec report_from_results(const std::string& title, const std::vector<WrsaResult>& results);

}  // namespace net2rdm
