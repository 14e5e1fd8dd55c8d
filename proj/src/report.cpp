#include "net2rdm/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>
#include <sstream>

#include "net2rdm/error.hpp"
#include "net2rdm/results.hpp"

namespace net2rdm {

namespace {

constexpr const char* kPalette[] = {"#4C72B0", "#DD8452", "#55A868", "#C44E52", "#8172B3", "#937860"};

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

bool finite_ceiling(const std::optional<NoiseCeiling>& nc) {
  return nc && std::isfinite(nc->lower) && std::isfinite(nc->upper);
}

}  // namespace

double AxisTransform::to_pixel(double value) const noexcept {
  const double frac = (hi - value) / (hi - lo);
  return ReportLayout::plot_top + frac * (ReportLayout::plot_bottom - ReportLayout::plot_top);
}

double AxisTransform::to_value(double pixel) const noexcept {
  const double frac = (pixel - ReportLayout::plot_top) / (ReportLayout::plot_bottom - ReportLayout::plot_top);
  return hi - frac * (hi - lo);
}

AxisTransform axis_for(const ReportSpec& spec) {
  double low = 0.0;
  double high = -std::numeric_limits<double>::infinity();
  for (const auto& b : spec.bars) {
    const double e = b.sem.value_or(0.0);
    low = std::min(low, b.mean_score - e);
    high = std::max(high, b.mean_score + e);
  }
  if (finite_ceiling(spec.noise_ceiling)) high = std::max(high, spec.noise_ceiling->upper);
  if (!std::isfinite(high)) high = 0.0;
  double span = high - low;
  if (span <= 0.0) span = 1.0;
  return {low - 0.05 * span, high + 0.05 * span};
}

std::string render_report(const ReportSpec& spec) {
  if (spec.bars.empty()) fail(ErrorCode::EmptyInput, "report needs at least one bar");
  using L = ReportLayout;
  const AxisTransform axis = axis_for(spec);

  // Groups of consecutive bars sharing a model, separated by one empty slot.
  std::vector<std::size_t> group_of(spec.bars.size(), 0);
  std::vector<std::string> models{spec.bars.front().model};
  for (std::size_t i = 1; i < spec.bars.size(); ++i) {
    if (spec.bars[i].model != spec.bars[i - 1].model) models.push_back(spec.bars[i].model);
    group_of[i] = models.size() - 1;
  }
  const double slots = static_cast<double>(spec.bars.size() + models.size() - 1);
  const double slot_w = (L::plot_right - L::plot_left) / slots;
  const double bar_w = 0.8 * slot_w;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"480\" viewBox=\"0 0 960 480\" "
         "font-family=\"DejaVu Sans, Arial, sans-serif\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"960\" height=\"480\" fill=\"#ffffff\"/>\n";
  svg << "<text class=\"title\" x=\"480\" y=\"28\" text-anchor=\"middle\" font-size=\"18\">" << escape(spec.title)
      << "</text>\n";

  if (finite_ceiling(spec.noise_ceiling)) {
    const double y_up = axis.to_pixel(spec.noise_ceiling->upper);
    const double y_lo = axis.to_pixel(spec.noise_ceiling->lower);
    svg << "<rect class=\"noise-ceiling\" x=\"" << px(L::plot_left) << "\" y=\"" << px(y_up) << "\" width=\""
        << px(L::plot_right - L::plot_left) << "\" height=\"" << px(y_lo - y_up)
        << "\" fill=\"#808080\" fill-opacity=\"0.3\" data-lower=\"" << format_double(spec.noise_ceiling->lower)
        << "\" data-upper=\"" << format_double(spec.noise_ceiling->upper) << "\"/>\n";
  }

  // Axes and ticks.
  svg << "<line class=\"axis\" x1=\"" << px(L::plot_left) << "\" y1=\"" << px(L::plot_top) << "\" x2=\""
      << px(L::plot_left) << "\" y2=\"" << px(L::plot_bottom) << "\" stroke=\"#000000\"/>\n";
  svg << "<line class=\"axis\" x1=\"" << px(L::plot_left) << "\" y1=\"" << px(axis.to_pixel(0.0)) << "\" x2=\""
      << px(L::plot_right) << "\" y2=\"" << px(axis.to_pixel(0.0)) << "\" stroke=\"#000000\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = axis.lo + (axis.hi - axis.lo) * t / 4.0;
    const double y = axis.to_pixel(v);
    char label[32];
    std::snprintf(label, sizeof label, "%.3f", v);
    svg << "<line class=\"tick\" x1=\"" << px(L::plot_left - 5) << "\" y1=\"" << px(y) << "\" x2=\""
        << px(L::plot_left) << "\" y2=\"" << px(y) << "\" stroke=\"#000000\"/>\n";
    svg << "<text class=\"tick-label\" x=\"" << px(L::plot_left - 8) << "\" y=\"" << px(y + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << label << "</text>\n";
  }
  svg << "<text class=\"axis-label\" x=\"20\" y=\"" << px(0.5 * (L::plot_top + L::plot_bottom))
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 "
      << px(0.5 * (L::plot_top + L::plot_bottom)) << ")\">" << escape(spec.axis_label) << "</text>\n";

  const double y0 = axis.to_pixel(0.0);
  for (std::size_t i = 0; i < spec.bars.size(); ++i) {
    const auto& b = spec.bars[i];
    const double slot = static_cast<double>(i + group_of[i]);
    const double x = L::plot_left + slot * slot_w + 0.1 * slot_w;
    const double cx = x + 0.5 * bar_w;
    const double yv = axis.to_pixel(b.mean_score);
    const char* color = kPalette[group_of[i] % std::size(kPalette)];
    svg << "<rect class=\"bar\" x=\"" << px(x) << "\" y=\"" << px(std::min(y0, yv)) << "\" width=\"" << px(bar_w)
        << "\" height=\"" << px(std::abs(y0 - yv)) << "\" fill=\"" << color << "\" data-model=\""
        << escape(b.model) << "\" data-layer=\"" << escape(b.layer) << "\" data-value=\""
        << format_double(b.mean_score) << "\"/>\n";

    double top_value = std::max(b.mean_score, 0.0);
    if (b.sem) {
      const double y_hi = axis.to_pixel(b.mean_score + *b.sem);
      const double y_lo = axis.to_pixel(b.mean_score - *b.sem);
      const double cap = 0.2 * bar_w;
      svg << "<line class=\"errorbar\" x1=\"" << px(cx) << "\" y1=\"" << px(y_lo) << "\" x2=\"" << px(cx)
          << "\" y2=\"" << px(y_hi) << "\" stroke=\"#000000\" data-sem=\"" << format_double(*b.sem) << "\"/>\n";
      svg << "<line class=\"errorbar\" x1=\"" << px(cx - cap) << "\" y1=\"" << px(y_hi) << "\" x2=\""
          << px(cx + cap) << "\" y2=\"" << px(y_hi) << "\" stroke=\"#000000\"/>\n";
      svg << "<line class=\"errorbar\" x1=\"" << px(cx - cap) << "\" y1=\"" << px(y_lo) << "\" x2=\""
          << px(cx + cap) << "\" y2=\"" << px(y_lo) << "\" stroke=\"#000000\"/>\n";
      top_value = std::max(top_value, b.mean_score + *b.sem);
    }
    if (b.significant) {
      svg << "<text class=\"significance\" x=\"" << px(cx) << "\" y=\"" << px(axis.to_pixel(top_value) - 4)
          << "\" text-anchor=\"middle\" font-size=\"16\">*</text>\n";
    }
    const double ly = L::plot_bottom + 14;
    svg << "<text class=\"bar-label\" x=\"" << px(cx) << "\" y=\"" << px(ly)
        << "\" text-anchor=\"end\" font-size=\"10\" transform=\"rotate(-35 " << px(cx) << " " << px(ly) << ")\">"
        << escape(b.layer) << "</text>\n";
  }

  // Legend, one entry per model.
  double lx = L::plot_left;
  for (std::size_t g = 0; g < models.size(); ++g) {
    svg << "<rect class=\"legend\" x=\"" << px(lx) << "\" y=\"36\" width=\"10\" height=\"10\" fill=\""
        << kPalette[g % std::size(kPalette)] << "\"/>\n";
    svg << "<text class=\"legend-label\" x=\"" << px(lx + 14) << "\" y=\"45\" font-size=\"11\">"
        << escape(models[g]) << "</text>\n";
    lx += 20.0 + 7.0 * static_cast<double>(models[g].size());
  }

  double ny = 420.0;
  for (const auto& note : spec.notes) {
    svg << "<text class=\"note\" x=\"" << px(L::plot_left) << "\" y=\"" << px(ny) << "\" font-size=\"11\">"
        << escape(note) << "</text>\n";
    ny += 14.0;
  }
  svg << "</svg>\n";
  return svg.str();
}

ReportSpec report_from_results(const std::string& title, const std::vector<EvaluationResult>& results) {
  ReportSpec spec;
  spec.title = title;
  for (const auto& r : results) {
    spec.bars.push_back({r.model_id, r.layer_name, r.mean_score, r.sem, r.significant});
    if (!spec.noise_ceiling && r.noise_ceiling) spec.noise_ceiling = r.noise_ceiling;
  }
  return spec;
}

ReportSpec report_from_results(const std::string& title, const std::vector<WrsaResult>& results) {
  ReportSpec spec;
  spec.title = title;
  for (const auto& r : results) {
    spec.bars.push_back({r.model_id, "weighted", r.mean_score, r.sem, r.significant});
    if (!spec.noise_ceiling && r.noise_ceiling) spec.noise_ceiling = r.noise_ceiling;
    // Mean weight per predictor over subjects and fitted folds.
    std::vector<double> sum(r.predictor_names.size(), 0.0);
    std::size_t fits = 0;
    for (const auto& subject : r.per_subject_folds) {
      for (const auto& f : subject) {
        if (f.weights.size() != sum.size()) continue;
        for (std::size_t p = 0; p < sum.size(); ++p) sum[p] += f.weights[p];
        ++fits;
      }
    }
    std::string line = r.model_id + " weights:";
    for (std::size_t p = 0; p < sum.size(); ++p) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "%.4f", fits ? sum[p] / static_cast<double>(fits) : 0.0);
      line += " " + r.predictor_names[p] + "=" + buf;
    }
    spec.notes.push_back(line);
  }
  return spec;
}

}  // namespace net2rdm
