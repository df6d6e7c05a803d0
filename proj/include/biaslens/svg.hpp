#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "biaslens/csv.hpp"
#include "biaslens/date.hpp"

namespace biaslens {
namespace svg {

// Self-contained text SVG, no external assets. Markers carry the exact
// numeric values in data-* attributes so tests (and scripts) can read them
// back without geometry math.

inline constexpr int kWidth = 880;
inline constexpr int kHeight = 420;
inline constexpr int kMarginLeft = 60;
inline constexpr int kMarginRight = 30;
inline constexpr int kMarginTop = 40;
inline constexpr int kMarginBottom = 60;

inline const char* series_color(std::size_t index) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  return palette[index % (sizeof(palette) / sizeof(palette[0]))];
}

inline std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string px(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

inline std::string open_svg(std::string_view title) {
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
         "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " +
         std::to_string(kWidth) + " " + std::to_string(kHeight) + "\">\n";
  out += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "  <text x=\"" + std::to_string(kWidth / 2) +
         "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
         xml_escape(title) + "</text>\n";
  return out;
}

inline std::string placeholder(std::string_view title) {
  std::string out = open_svg(title);
  out += "  <text x=\"" + std::to_string(kWidth / 2) + "\" y=\"" +
         std::to_string(kHeight / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\" "
         "fill=\"#888\">no data</text>\n";
  out += "</svg>\n";
  return out;
}

struct LinePoint {
  Date date;
  double value = 0.0;
  std::size_t n = 0;
};

struct LineSeries {
  std::string name;
  std::vector<LinePoint> points;
};

struct EventMarker {
  Date date;
  std::string caption;
};

/// Time-series line chart with circle markers and vertical event markers.
/// The y-range is fixed (callers pass [-1, 1] for bias series so charts stay
/// comparable).
inline std::string line_chart(std::string_view title, const std::vector<LineSeries>& series,
                              const std::vector<EventMarker>& events, double y_min,
                              double y_max) {
  bool any_points = false;
  for (const auto& s : series) any_points = any_points || !s.points.empty();
  if (!any_points) return placeholder(title);

  long min_day = 0, max_day = 0;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      const long day = p.date.to_days().time_since_epoch().count();
      if (first || day < min_day) min_day = day;
      if (first || day > max_day) max_day = day;
      first = false;
    }
  }
  if (max_day == min_day) ++max_day;  // single point: avoid zero span

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto x_of = [&](const Date& d) {
    const long day = d.to_days().time_since_epoch().count();
    return kMarginLeft + plot_w * double(day - min_day) / double(max_day - min_day);
  };
  auto y_of = [&](double v) {
    return kMarginTop + plot_h * (1.0 - (v - y_min) / (y_max - y_min));
  };

  std::string out = open_svg(title);
  // frame and zero line
  out += "  <rect x=\"" + std::to_string(kMarginLeft) + "\" y=\"" + std::to_string(kMarginTop) +
         "\" width=\"" + px(plot_w) + "\" height=\"" + px(plot_h) +
         "\" fill=\"none\" stroke=\"#ccc\"/>\n";
  if (y_min < 0 && y_max > 0) {
    const std::string zero_y = px(y_of(0));
    out += "  <line x1=\"" + std::to_string(kMarginLeft) + "\" y1=\"" + zero_y + "\" x2=\"" +
           px(kMarginLeft + plot_w) + "\" y2=\"" + zero_y + "\" stroke=\"#ddd\"/>\n";
  }
  for (double v : {y_min, (y_min + y_max) / 2, y_max}) {
    out += "  <text x=\"" + std::to_string(kMarginLeft - 8) + "\" y=\"" + px(y_of(v) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           csv::format_double(v) + "</text>\n";
  }

  for (const EventMarker& event : events) {
    const long day = event.date.to_days().time_since_epoch().count();
    if (day < min_day || day > max_day) continue;
    const std::string x = px(x_of(event.date));
    out += "  <line class=\"event\" x1=\"" + x + "\" y1=\"" + std::to_string(kMarginTop) +
           "\" x2=\"" + x + "\" y2=\"" + px(kMarginTop + plot_h) +
           "\" stroke=\"#999\" stroke-dasharray=\"4 3\" data-date=\"" +
           event.date.to_string() + "\"/>\n";
    out += "  <text class=\"event-caption\" x=\"" + x + "\" y=\"" +
           std::to_string(kMarginTop - 6) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\" "
           "fill=\"#555\">" +
           xml_escape(event.caption) + "</text>\n";
  }

  for (std::size_t si = 0; si < series.size(); ++si) {
    const LineSeries& s = series[si];
    if (s.points.empty()) continue;
    const char* color = series_color(si);
    std::string points_attr;
    for (const LinePoint& p : s.points) {
      if (!points_attr.empty()) points_attr.push_back(' ');
      points_attr += px(x_of(p.date)) + "," + px(y_of(p.value));
    }
    out += "  <polyline fill=\"none\" stroke=\"";
    out += color;
    out += "\" stroke-width=\"1.5\" data-series=\"" + xml_escape(s.name) + "\" points=\"" +
           points_attr + "\"/>\n";
    for (const LinePoint& p : s.points) {
      out += "  <circle cx=\"" + px(x_of(p.date)) + "\" cy=\"" + px(y_of(p.value)) +
             "\" r=\"2.5\" fill=\"";
      out += color;
      out += "\" data-series=\"" + xml_escape(s.name) + "\" data-date=\"" +
             p.date.to_string() + "\" data-value=\"" + csv::format_double(p.value) +
             "\" data-n=\"" + std::to_string(p.n) + "\"/>\n";
    }
    out += "  <text x=\"" + px(kMarginLeft + 8) + "\" y=\"" +
           px(kMarginTop + 16 + 14 * double(si)) +
           "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"";
    out += color;
    out += "\">" + xml_escape(s.name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

struct BarGroup {
  std::string label;                 // e.g. "Pre-war Left"
  std::vector<double> values;        // one per series
};

/// Grouped bar chart (proportions and emotion distributions). Values are
/// expected in [0, 1].
inline std::string grouped_bar_chart(std::string_view title,
                                     const std::vector<std::string>& series_names,
                                     const std::vector<BarGroup>& groups) {
  if (groups.empty() || series_names.empty()) return placeholder(title);

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const double group_w = plot_w / double(groups.size());
  const double bar_w = group_w * 0.8 / double(series_names.size());
  auto y_of = [&](double v) { return kMarginTop + plot_h * (1.0 - v); };

  std::string out = open_svg(title);
  out += "  <rect x=\"" + std::to_string(kMarginLeft) + "\" y=\"" + std::to_string(kMarginTop) +
         "\" width=\"" + px(plot_w) + "\" height=\"" + px(plot_h) +
         "\" fill=\"none\" stroke=\"#ccc\"/>\n";
  for (double v : {0.0, 0.5, 1.0}) {
    out += "  <text x=\"" + std::to_string(kMarginLeft - 8) + "\" y=\"" + px(y_of(v) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           csv::format_double(v) + "</text>\n";
  }

  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const BarGroup& group = groups[gi];
    const double group_x = kMarginLeft + group_w * double(gi) + group_w * 0.1;
    for (std::size_t si = 0; si < series_names.size() && si < group.values.size(); ++si) {
      const double v = group.values[si];
      const double x = group_x + bar_w * double(si);
      const double y = y_of(v);
      out += "  <rect x=\"" + px(x) + "\" y=\"" + px(y) + "\" width=\"" + px(bar_w) +
             "\" height=\"" + px(kMarginTop + plot_h - y) + "\" fill=\"";
      out += series_color(si);
      out += "\" data-group=\"" + xml_escape(group.label) + "\" data-series=\"" +
             xml_escape(series_names[si]) + "\" data-value=\"" + csv::format_double(v) +
             "\"/>\n";
    }
    out += "  <text x=\"" + px(kMarginLeft + group_w * (double(gi) + 0.5)) + "\" y=\"" +
           px(kMarginTop + plot_h + 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
           xml_escape(group.label) + "</text>\n";
  }
  for (std::size_t si = 0; si < series_names.size(); ++si) {
    out += "  <text x=\"" + px(kMarginLeft + 8 + 120 * double(si)) + "\" y=\"" +
           px(kMarginTop + plot_h + 38) + "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"";
    out += series_color(si);
    out += "\">" + xml_escape(series_names[si]) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace svg
}  // namespace biaslens
