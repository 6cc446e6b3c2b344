// Copyright 2026 The cvskit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Excitability phase diagram: one point per epoch at (train - test
// divergence, CVS), split into regions by a median-CVS threshold.

#ifndef CVSKIT_PHASE_HPP
#define CVSKIT_PHASE_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cvskit/datamodel.hpp"
#include "cvskit/io.hpp"
#include "cvskit/trajectory.hpp"

namespace cvs {

enum class Region { StructuralDiscovery, Optimal, BenignOverfitting };

inline std::string_view to_string(Region r) {
  switch (r) {
    case Region::StructuralDiscovery: return "StructuralDiscovery";
    case Region::Optimal: return "Optimal";
    case Region::BenignOverfitting: return "BenignOverfitting";
  }
  return "?";
}

inline std::optional<Region> region_from_string(std::string_view s) {
  if (s == "StructuralDiscovery") return Region::StructuralDiscovery;
  if (s == "Optimal") return Region::Optimal;
  if (s == "BenignOverfitting") return Region::BenignOverfitting;
  return std::nullopt;
}

struct PhasePoint {
  int epoch = 0;
  double divergence = 0.0;  // train - test, percentage points
  double cvs = 0.0;
  std::optional<double> loss;
  std::optional<Region> region;
};

struct PhaseDiagram {
  std::vector<PhasePoint> points;
  double excitability_threshold = 0.0;
};

inline std::vector<PhasePoint> build_phase_points(const Trajectory& t) {
  std::vector<PhasePoint> points;
  points.reserve(t.size());
  for (const auto& e : t.epochs) {
    const auto cvs = cvs_of(e);
    if (!cvs) {
      throw InvalidArgument("epoch " + std::to_string(e.epoch) +
                            " has no CVS");
    }
    PhasePoint p;
    p.epoch = e.epoch;
    p.divergence = -epoch_gap(e);
    p.cvs = *cvs;
    p.loss = e.train_loss;
    points.push_back(p);
  }
  return points;
}

/// Median CVS; the mean of the two middle values for an even count.
inline double excitability_threshold(std::span<const PhasePoint> points) {
  if (points.empty()) throw InvalidArgument("no phase points");
  std::vector<double> v;
  v.reserve(points.size());
  for (const auto& p : points) v.push_back(p.cvs);
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Reconstructed region rule: a strong early negative divergence is
/// discovery; otherwise the median threshold separates optimal from benign
/// overfitting.
inline Region classify_region(const PhasePoint& p, double threshold,
                              const AnalysisConfig& config) {
  if (p.divergence <= -config.spike_delta) return Region::StructuralDiscovery;
  if (p.cvs >= threshold) return Region::Optimal;
  return Region::BenignOverfitting;
}

inline PhaseDiagram build_phase_diagram(const Trajectory& t,
                                        const AnalysisConfig& config) {
  PhaseDiagram d;
  d.points = build_phase_points(t);
  d.excitability_threshold = excitability_threshold(d.points);
  for (auto& p : d.points) {
    p.region = classify_region(p, d.excitability_threshold, config);
  }
  return d;
}

// -- color -------------------------------------------------------------------

struct Rgb {
  double r = 0, g = 0, b = 0;  // 0..255
};

/// Sequential light-to-dark orange ramp; t in [0,1], 1 darkest.
inline Rgb loss_color(double t) {
  static constexpr Rgb kStops[] = {
      {255, 245, 235}, {254, 230, 206}, {253, 208, 162},
      {253, 174, 107}, {253, 141, 60},  {241, 105, 19},
      {217, 72, 1},    {166, 54, 3},    {127, 39, 4}};
  constexpr int n = sizeof(kStops) / sizeof(kStops[0]);
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * (n - 1);
  const int i = std::min(static_cast<int>(pos), n - 2);
  const double f = pos - i;
  const auto& a = kStops[i];
  const auto& b = kStops[i + 1];
  return {a.r + (b.r - a.r) * f, a.g + (b.g - a.g) * f, a.b + (b.b - a.b) * f};
}

inline constexpr Rgb kMissingLossColor{160, 160, 160};

/// Rec. 709 relative luminance of an sRGB color.
inline double luminance(const Rgb& c) {
  auto lin = [](double v) {
    v /= 255.0;
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
  };
  return 0.2126 * lin(c.r) + 0.7152 * lin(c.g) + 0.0722 * lin(c.b);
}

inline std::string to_hex(const Rgb& c) {
  auto byte = [](double v) {
    return static_cast<int>(std::lround(std::clamp(v, 0.0, 255.0)));
  };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", byte(c.r), byte(c.g),
                byte(c.b));
  return buf;
}

/// Fill color for each point, normalizing loss over the diagram.
inline std::vector<Rgb> point_colors(std::span<const PhasePoint> points) {
  std::optional<double> lo, hi;
  for (const auto& p : points) {
    if (!p.loss) continue;
    lo = lo ? std::min(*lo, *p.loss) : *p.loss;
    hi = hi ? std::max(*hi, *p.loss) : *p.loss;
  }
  std::vector<Rgb> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    if (!p.loss) {
      out.push_back(kMissingLossColor);
    } else if (*hi - *lo <= 0.0) {
      out.push_back(loss_color(0.5));
    } else {
      out.push_back(loss_color((*p.loss - *lo) / (*hi - *lo)));
    }
  }
  return out;
}

// -- rendering ---------------------------------------------------------------

struct AxisRange {
  double lo = 0.0;
  double hi = 1.0;
};

struct PhaseStyle {
  double width = 800;
  double height = 600;
  double margin_left = 80;
  double margin_right = 40;
  double margin_top = 50;
  double margin_bottom = 70;
  double padding = 0.10;  // fraction of the data span added on both sides
  std::optional<AxisRange> x_range;  // fixed ranges override auto-fit
  std::optional<AxisRange> y_range;
  double point_radius = 7;
  std::string title = "Excitability Phase Diagram";
};

/// Data-to-pixel mapping of the plot area.
struct PlotFrame {
  AxisRange x, y;
  double left = 0, top = 0, plot_width = 0, plot_height = 0;

  double map_x(double v) const {
    return left + (v - x.lo) / (x.hi - x.lo) * plot_width;
  }
  double map_y(double v) const {
    return top + (1.0 - (v - y.lo) / (y.hi - y.lo)) * plot_height;
  }
};

namespace detail {

inline AxisRange padded(double lo, double hi, double padding) {
  double span = hi - lo;
  if (span <= 0.0) span = std::max(std::abs(lo), 1.0);
  return {lo - padding * span, hi + padding * span};
}

inline std::string fmt2(double v) { return detail::format_fixed(v, 2); }

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
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

inline std::string_view region_label(Region r) {
  switch (r) {
    case Region::StructuralDiscovery: return "Structural Discovery";
    case Region::Optimal: return "Optimal State";
    case Region::BenignOverfitting: return "Benign Overfitting";
  }
  return "";
}

inline std::string_view region_color(Region r) {
  switch (r) {
    case Region::StructuralDiscovery: return "#2ca02c";
    case Region::Optimal: return "#1f77b4";
    case Region::BenignOverfitting: return "#ff7f0e";
  }
  return "#000000";
}

}  // namespace detail

inline PlotFrame make_frame(const PhaseDiagram& d, const PhaseStyle& style) {
  if (d.points.empty()) throw InvalidArgument("empty phase diagram");
  PlotFrame f;
  f.left = style.margin_left;
  f.top = style.margin_top;
  f.plot_width = style.width - style.margin_left - style.margin_right;
  f.plot_height = style.height - style.margin_top - style.margin_bottom;
  if (style.x_range) {
    f.x = *style.x_range;
  } else {
    auto [mn, mx] = std::minmax_element(
        d.points.begin(), d.points.end(),
        [](const auto& a, const auto& b) { return a.divergence < b.divergence; });
    f.x = detail::padded(mn->divergence, mx->divergence, style.padding);
  }
  if (style.y_range) {
    f.y = *style.y_range;
  } else {
    double lo = d.excitability_threshold, hi = d.excitability_threshold;
    for (const auto& p : d.points) {
      lo = std::min(lo, p.cvs);
      hi = std::max(hi, p.cvs);
    }
    f.y = detail::padded(lo, hi, style.padding);
  }
  if (!(f.x.hi > f.x.lo) || !(f.y.hi > f.y.lo)) {
    throw InvalidArgument("axis range must have hi > lo");
  }
  return f;
}

/// Self-contained SVG 1.1: a circle per epoch (filled by training loss,
/// outlined by region), an arrow between consecutive epochs, and the dashed
/// median-CVS threshold.
inline std::string render_phase_svg(const PhaseDiagram& d,
                                    const PhaseStyle& style = {}) {
  using detail::fmt2;
  const PlotFrame f = make_frame(d, style);
  const auto colors = point_colors(d.points);
  std::ostringstream s;
  s << R"(<?xml version="1.0" encoding="UTF-8"?>)" << '\n'
    << R"(<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width=")"
    << fmt2(style.width) << R"(" height=")" << fmt2(style.height)
    << R"(" viewBox="0 0 )" << fmt2(style.width) << ' ' << fmt2(style.height)
    << R"(" font-family="sans-serif">)" << '\n';
  s << R"(  <defs><marker id="arrowhead" markerWidth="8" markerHeight="8" refX="7" refY="4" orient="auto"><polygon points="0,0 8,4 0,8" fill="#555555"/></marker></defs>)"
    << '\n';
  s << R"(  <rect x="0" y="0" width=")" << fmt2(style.width) << R"(" height=")"
    << fmt2(style.height) << R"(" fill="#ffffff"/>)" << '\n';
  s << R"(  <text x=")" << fmt2(style.width / 2) << R"(" y="28" text-anchor="middle" font-size="18">)"
    << detail::xml_escape(style.title) << "</text>\n";

  // Axes and ticks.
  const double x0 = f.left, x1 = f.left + f.plot_width;
  const double y0 = f.top, y1 = f.top + f.plot_height;
  s << R"(  <g class="axes" stroke="#000000" stroke-width="1">)" << '\n'
    << R"(    <line x1=")" << fmt2(x0) << R"(" y1=")" << fmt2(y1) << R"(" x2=")"
    << fmt2(x1) << R"(" y2=")" << fmt2(y1) << R"("/>)" << '\n'
    << R"(    <line x1=")" << fmt2(x0) << R"(" y1=")" << fmt2(y0) << R"(" x2=")"
    << fmt2(x0) << R"(" y2=")" << fmt2(y1) << R"("/>)" << '\n'
    << "  </g>\n";
  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double xv = f.x.lo + (f.x.hi - f.x.lo) * i / kTicks;
    const double yv = f.y.lo + (f.y.hi - f.y.lo) * i / kTicks;
    s << R"(  <text class="tick" x=")" << fmt2(f.map_x(xv)) << R"(" y=")"
      << fmt2(y1 + 18) << R"(" text-anchor="middle" font-size="11">)"
      << fmt2(xv) << "</text>\n";
    s << R"(  <text class="tick" x=")" << fmt2(x0 - 8) << R"(" y=")"
      << fmt2(f.map_y(yv) + 4) << R"(" text-anchor="end" font-size="11">)"
      << detail::format_fixed(yv, 3) << "</text>\n";
  }
  s << R"(  <text class="axis-label" x=")" << fmt2((x0 + x1) / 2) << R"(" y=")"
    << fmt2(style.height - 20)
    << R"(" text-anchor="middle" font-size="14">Train )"
    << "\xE2\x88\x92" << " Test (pp)</text>\n";
  s << R"(  <text class="axis-label" x="20" y=")" << fmt2((y0 + y1) / 2)
    << R"(" text-anchor="middle" font-size="14" transform="rotate(-90 20 )"
    << fmt2((y0 + y1) / 2) << ")\">CVS</text>\n";

  // Threshold.
  const double ty = f.map_y(d.excitability_threshold);
  s << R"(  <line class="threshold" x1=")" << fmt2(x0) << R"(" y1=")"
    << fmt2(ty) << R"(" x2=")" << fmt2(x1) << R"(" y2=")" << fmt2(ty)
    << R"(" stroke="#d62ad6" stroke-width="1.5" stroke-dasharray="6,4"/>)"
    << '\n';
  s << R"(  <text x=")" << fmt2(x0 + 6) << R"(" y=")" << fmt2(ty - 6)
    << R"(" font-size="11" fill="#d62ad6">median CVS )"
    << detail::format_fixed(d.excitability_threshold, 4) << "</text>\n";

  // Arrows between consecutive epochs, shortened so heads clear the markers.
  for (std::size_t i = 1; i < d.points.size(); ++i) {
    double ax = f.map_x(d.points[i - 1].divergence);
    double ay = f.map_y(d.points[i - 1].cvs);
    double bx = f.map_x(d.points[i].divergence);
    double by = f.map_y(d.points[i].cvs);
    const double len = std::hypot(bx - ax, by - ay);
    const double cut = style.point_radius + 2;
    if (len > 2 * cut) {
      const double ux = (bx - ax) / len, uy = (by - ay) / len;
      ax += ux * cut;
      ay += uy * cut;
      bx -= ux * cut;
      by -= uy * cut;
    }
    s << R"(  <path class="arrow" d="M )" << fmt2(ax) << ' ' << fmt2(ay)
      << " L " << fmt2(bx) << ' ' << fmt2(by)
      << "\" stroke=\"#555555\" stroke-width=\"1.2\" fill=\"none\""
         " marker-end=\"url(#arrowhead)\"/>\n";
  }

  // Epoch markers.
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    const auto& p = d.points[i];
    const auto stroke =
        p.region ? detail::region_color(*p.region) : std::string_view("#000000");
    s << R"(  <circle class="epoch" cx=")" << fmt2(f.map_x(p.divergence))
      << R"(" cy=")" << fmt2(f.map_y(p.cvs)) << R"(" r=")"
      << fmt2(style.point_radius) << R"(" fill=")" << to_hex(colors[i])
      << R"(" stroke=")" << stroke << R"(" stroke-width="2"/>)" << '\n';
    s << R"(  <text class="epoch-label" x=")"
      << fmt2(f.map_x(p.divergence) + style.point_radius + 3) << R"(" y=")"
      << fmt2(f.map_y(p.cvs) - style.point_radius) << R"(" font-size="10">E)"
      << p.epoch << "</text>\n";
  }

  // Region legend, bottom left; trajectories tend to end near zero divergence.
  std::vector<std::pair<Region, std::string>> legend;
  for (auto r : {Region::StructuralDiscovery, Region::Optimal,
                 Region::BenignOverfitting}) {
    std::string members;
    for (const auto& p : d.points) {
      if (p.region == r) {
        members += members.empty() ? "E" : ", E";
        members += std::to_string(p.epoch);
      }
    }
    if (!members.empty()) legend.emplace_back(r, members);
  }
  double ly = y1 - 8 - 16.0 * static_cast<double>(legend.size() - 1);
  for (const auto& [r, members] : legend) {
    s << R"(  <text class="region" x=")" << fmt2(x0 + 8) << R"(" y=")"
      << fmt2(ly) << R"(" font-size="12" fill=")" << detail::region_color(r)
      << R"(">)" << detail::region_label(r) << " (" << members << ")</text>\n";
    ly += 16;
  }
  s << "</svg>\n";
  return s.str();
}

inline std::string export_phase_csv(const PhaseDiagram& d) {
  if (d.points.empty()) throw InvalidArgument("empty phase diagram");
  std::string out = "epoch,divergence,cvs,loss,region\n";
  for (const auto& p : d.points) {
    out += std::to_string(p.epoch) + ',' + detail::format_fixed(p.divergence, 6) + ',' +
           detail::format_fixed(p.cvs, 6) + ',' +
           (p.loss ? detail::format_fixed(*p.loss, 6) : std::string()) + ',' +
           (p.region ? std::string(to_string(*p.region)) : std::string()) +
           '\n';
  }
  return out;
}

/// Reads the format written by export_phase_csv.
inline std::vector<PhasePoint> parse_phase_csv(std::istream& in) {
  std::vector<PhasePoint> points;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv(line);
    if (!header) {
      if (detail::trim(line) != "epoch,divergence,cvs,loss,region") {
        throw ParseError("bad phase header" + detail::at_line(line_no));
      }
      header = true;
      continue;
    }
    if (cells.size() != 5) {
      throw ParseError("wrong number of fields" + detail::at_line(line_no));
    }
    PhasePoint p;
    const auto epoch = detail::parse_number<int>(cells[0]);
    const auto div = detail::parse_number<double>(cells[1]);
    const auto cvs = detail::parse_number<double>(cells[2]);
    if (!epoch || !div || !cvs) {
      throw ParseError("bad phase row" + detail::at_line(line_no));
    }
    p.epoch = *epoch;
    p.divergence = *div;
    p.cvs = *cvs;
    if (!cells[3].empty()) p.loss = detail::parse_number<double>(cells[3]);
    if (!cells[4].empty()) {
      p.region = region_from_string(cells[4]);
      if (!p.region) throw ParseError("bad region" + detail::at_line(line_no));
    }
    points.push_back(p);
  }
  return points;
}

}  // namespace cvs

#endif  // CVSKIT_PHASE_HPP
