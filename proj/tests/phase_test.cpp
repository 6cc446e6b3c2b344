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

#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <algorithm>
#include <random>
#include <sstream>
#include <string>

#include "cvskit/phase.hpp"
#include "fixtures.hpp"

namespace {

namespace pt = boost::property_tree;

const cvs::AnalysisConfig kDefaults{};

// Parses with an independent XML reader; throws if not well-formed.
pt::ptree parse_xml(const std::string& text) {
  std::istringstream in(text);
  pt::ptree tree;
  pt::read_xml(in, tree);
  return tree;
}

struct SvgCounts {
  int circles = 0;
  int arrows = 0;
  int dashed = 0;
  std::vector<const pt::ptree*> dashed_lines;
};

void count(const pt::ptree& node, const std::string& name, SvgCounts& c) {
  if (name == "circle") ++c.circles;
  if (name == "path" &&
      node.get<std::string>("<xmlattr>.class", "") == "arrow") {
    ++c.arrows;
  }
  if (name == "line" && node.get_child_optional("<xmlattr>.stroke-dasharray")) {
    ++c.dashed;
    c.dashed_lines.push_back(&node);
  }
  for (const auto& [child, sub] : node) count(sub, child, c);
}

SvgCounts count_svg(const pt::ptree& doc) {
  SvgCounts c;
  count(doc.get_child("svg"), "svg", c);
  return c;
}

cvs::PhaseDiagram diagram_of(std::vector<double> cvs_values) {
  cvs::Trajectory t;
  int n = 1;
  for (double v : cvs_values) {
    cvs::EpochSummary e;
    e.epoch = n;
    e.train_acc = 0.9;
    e.test_acc = 0.9 - 0.001 * n;
    e.train_loss = 1.0 / n;
    e.metrics = cvs::MetricSet{};
    e.metrics->cvs = v;
    t.epochs.push_back(e);
    ++n;
  }
  return cvs::build_phase_diagram(t, kDefaults);
}

TEST(PhasePoints, MnistEpochOne) {
  const auto pts = cvs::build_phase_points(fixtures::load("mnist_phase.csv"));
  ASSERT_EQ(pts.size(), 7u);
  EXPECT_EQ(pts[0].epoch, 1);
  EXPECT_NEAR(pts[0].divergence, -10.54, 1e-9);
  EXPECT_DOUBLE_EQ(pts[0].cvs, 0.511);
}

TEST(PhasePoints, EqualAccuraciesAndImdbEpochOne) {
  cvs::Trajectory t;
  cvs::EpochSummary e;
  e.epoch = 1;
  e.train_acc = e.test_acc = 0.9;
  e.metrics = cvs::MetricSet{};
  e.metrics->cvs = 0.3;
  t.epochs.push_back(e);
  EXPECT_DOUBLE_EQ(cvs::build_phase_points(t)[0].divergence, 0.0);

  const auto imdb = cvs::build_phase_points(fixtures::load("imdb_filtered.csv"));
  EXPECT_NEAR(imdb[0].divergence, -7.25, 1e-9);
  EXPECT_NEAR(imdb[0].cvs, 0.5217, 5e-4);
}

TEST(PhasePoints, MissingCvsRejected) {
  EXPECT_THROW(cvs::build_phase_points(fixtures::load("imdb_full.csv")),
               cvs::InvalidArgument);
}

TEST(Threshold, Median) {
  auto pts = [](std::vector<double> v) {
    std::vector<cvs::PhasePoint> out;
    for (double c : v) out.push_back({1, 0.0, c, {}, {}});
    return out;
  };
  EXPECT_DOUBLE_EQ(cvs::excitability_threshold(pts({0.1, 0.5, 0.9})), 0.5);
  EXPECT_DOUBLE_EQ(cvs::excitability_threshold(pts({0.2, 0.4})), 0.3);
  EXPECT_THROW(cvs::excitability_threshold(pts({})), cvs::InvalidArgument);
}

TEST(Threshold, PublishedImdbCvsValues) {
  std::vector<cvs::PhasePoint> pts;
  for (const auto& m : fixtures::kImdbMetrics) pts.push_back({1, 0, m.cvs, {}, {}});
  EXPECT_NEAR(cvs::excitability_threshold(pts), 0.1629, 5e-5);
  const auto d = cvs::build_phase_diagram(fixtures::load("imdb_filtered.csv"), kDefaults);
  EXPECT_NEAR(d.excitability_threshold, 0.1629, 5e-4);
}

TEST(Regions, MnistCaption) {
  const auto d = cvs::build_phase_diagram(fixtures::load("mnist_phase.csv"), kDefaults);
  EXPECT_DOUBLE_EQ(d.excitability_threshold, 0.438);
  EXPECT_EQ(d.points.front().region, cvs::Region::StructuralDiscovery);
  EXPECT_EQ(d.points[1].region, cvs::Region::Optimal);  // E4, cvs 0.571
  EXPECT_EQ(d.points.back().epoch, 28);
  EXPECT_NEAR(d.points.back().divergence, 0.76, 1e-9);
  EXPECT_EQ(d.points.back().region, cvs::Region::BenignOverfitting);
}

TEST(Svg, OnePointHasNoArrows) {
  const auto svg = cvs::render_phase_svg(diagram_of({0.4}));
  const auto c = count_svg(parse_xml(svg));
  EXPECT_EQ(c.circles, 1);
  EXPECT_EQ(c.arrows, 0);
  EXPECT_EQ(c.dashed, 1);
}

TEST(Svg, TenPointsHaveNineArrows) {
  const auto svg = cvs::render_phase_svg(
      diagram_of({0.5, 0.6, 0.4, 0.3, 0.35, 0.2, 0.25, 0.1, 0.15, 0.12}));
  const auto c = count_svg(parse_xml(svg));
  EXPECT_EQ(c.circles, 10);
  EXPECT_EQ(c.arrows, 9);
}

TEST(Svg, ImdbThresholdLineSitsAtMappedMedian) {
  const auto d = cvs::build_phase_diagram(fixtures::load("imdb_filtered.csv"), kDefaults);
  cvs::PhaseStyle style;
  style.y_range = cvs::AxisRange{0.0, 1.0};
  style.x_range = cvs::AxisRange{-40.0, 10.0};
  const auto doc = parse_xml(cvs::render_phase_svg(d, style));
  const auto c = count_svg(doc);
  ASSERT_EQ(c.dashed, 1);
  EXPECT_EQ(c.circles, 10);
  EXPECT_EQ(c.arrows, 9);
  // Plot area spans margin_top .. height - margin_bottom for y in [0, 1].
  const double top = style.margin_top;
  const double h = style.height - style.margin_top - style.margin_bottom;
  const double want = top + (1.0 - d.excitability_threshold) * h;
  const double y1 = c.dashed_lines[0]->get<double>("<xmlattr>.y1");
  const double y2 = c.dashed_lines[0]->get<double>("<xmlattr>.y2");
  EXPECT_NEAR(y1, want, 0.006);
  EXPECT_NEAR(y2, want, 0.006);
  EXPECT_NEAR(y1, top + (1.0 - 0.1629) * h, 0.5);
}

TEST(Svg, MnistFixtureIsWellFormed) {
  const auto d = cvs::build_phase_diagram(fixtures::load("mnist_phase.csv"), kDefaults);
  const auto c = count_svg(parse_xml(cvs::render_phase_svg(d)));
  EXPECT_EQ(c.circles, 7);
  EXPECT_EQ(c.arrows, 6);
}

TEST(Svg, TitleIsEscaped) {
  cvs::PhaseStyle style;
  style.title = "a < b & \"c\"";
  EXPECT_NO_THROW(parse_xml(cvs::render_phase_svg(diagram_of({0.1, 0.2}), style)));
}

TEST(Svg, EmptyDiagramRejected) {
  EXPECT_THROW(cvs::render_phase_svg(cvs::PhaseDiagram{}), cvs::InvalidArgument);
}

TEST(Color, DarkerMeansHigherLoss) {
  double prev = 2.0;
  for (int i = 0; i <= 100; ++i) {
    const double l = cvs::luminance(cvs::loss_color(i / 100.0));
    EXPECT_LT(l, prev);
    prev = l;
  }
}

TEST(Color, NormalizesOverDiagram) {
  const auto d = diagram_of({0.5, 0.4, 0.3});
  const auto colors = cvs::point_colors(d.points);
  // Losses are 1, 1/2, 1/3: the first epoch is the darkest.
  EXPECT_EQ(cvs::to_hex(colors[0]), cvs::to_hex(cvs::loss_color(1.0)));
  EXPECT_EQ(cvs::to_hex(colors[2]), cvs::to_hex(cvs::loss_color(0.0)));
}

TEST(PhaseCsv, LineCountAndEmpty) {
  const auto csv = cvs::export_phase_csv(diagram_of({0.1, 0.2, 0.3}));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epoch,divergence,cvs,loss,region");
  EXPECT_THROW(cvs::export_phase_csv(cvs::PhaseDiagram{}), cvs::InvalidArgument);
}

TEST(PhaseCsv, RoundTripToSixDecimals) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  cvs::Trajectory t;
  for (int i = 1; i <= 30; ++i) {
    cvs::EpochSummary e;
    e.epoch = i;
    e.train_acc = u(rng);
    e.test_acc = u(rng);
    if (i % 3) e.train_loss = 3 * u(rng);
    e.metrics = cvs::MetricSet{};
    e.metrics->cvs = u(rng);
    t.epochs.push_back(e);
  }
  const auto d = cvs::build_phase_diagram(t, kDefaults);
  std::istringstream in(cvs::export_phase_csv(d));
  const auto back = cvs::parse_phase_csv(in);
  ASSERT_EQ(back.size(), d.points.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].epoch, d.points[i].epoch);
    EXPECT_NEAR(back[i].divergence, d.points[i].divergence, 5e-7);
    EXPECT_NEAR(back[i].cvs, d.points[i].cvs, 5e-7);
    EXPECT_EQ(back[i].loss.has_value(), d.points[i].loss.has_value());
    EXPECT_EQ(back[i].region, d.points[i].region);
  }
}

}  // namespace
