#include <gtest/gtest.h>

#include "detcal/svg.hpp"

namespace detcal {
namespace {

ReliabilityProfile profile() {
  ReliabilityProfile p;
  p.n_det = 3;
  p.bins = {{0.05, 0.5, 2, 1, 0.3, 0.5}, {0.5, 0.75, 1, 1, 0.6, 1.0}, {0.75, 1.0, 0, 0, 0.875, 0.0}};
  return p;
}

std::size_t count(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto pos = s.find(what); pos != std::string::npos; pos = s.find(what, pos + 1)) ++n;
  return n;
}

void expect_well_formed(const std::string& svg) {
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(count(svg, "<g"), count(svg, "</g>"));
  EXPECT_EQ(count(svg, "<text"), count(svg, "</text>"));
  EXPECT_EQ(svg.find("nan"), std::string::npos);
}

TEST(Svg, ReliabilityDiagram) {
  const auto a = svg::reliability_diagram(profile(), "LSE <20> & co");
  EXPECT_EQ(a, svg::reliability_diagram(profile(), "LSE <20> & co"));
  expect_well_formed(a);
  EXPECT_NE(a.find("LSE &lt;20&gt; &amp; co"), std::string::npos);
}

TEST(Svg, SweepAndAgreementPlots) {
  std::vector<SweepRow> rows;
  for (std::size_t s : {2, 4}) {
    for (auto st : {Strategy::LSE, Strategy::RSE}) {
      SweepRow r;
      r.strategy = st;
      r.size = s;
      r.result.metric_name = "map";
      r.result.mean = st == Strategy::LSE ? 0.4 : 0.42;
      r.result.std = 0.01;
      rows.push_back(r);
    }
  }
  const auto sweep = svg::sweep_plot(rows, "map", "mAP");
  expect_well_formed(sweep);
  EXPECT_EQ(sweep, svg::sweep_plot(rows, "map", "mAP"));

  AgreementCurve curve;
  curve.points = {{0.1, 0.9, 0.05}, {0.5, 0.6, 0.1}, {0.9, 0.1, 0.05}};
  const auto agree = svg::agreement_plot(curve, "agreement");
  expect_well_formed(agree);
  expect_well_formed(svg::agreement_plot(AgreementCurve{}, "empty"));
}

}  // namespace
}  // namespace detcal
