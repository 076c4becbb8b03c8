#include <gtest/gtest.h>

#include <opencv2/imgproc.hpp>
#include <set>

#include "docsynth/error.hpp"
#include "docsynth/labels.hpp"
#include "docsynth/postproc.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace docsynth;
using docsynth::testing::demo_font;
using docsynth::testing::demo_store;
using docsynth::testing::fill_holes;
using docsynth::testing::flood_fill_components;
using docsynth::testing::horizontal_line;

namespace {

cv::Mat rect_mask(cv::Size size, cv::Rect r) {
  cv::Mat m = cv::Mat::zeros(size, CV_8UC1);
  m(r).setTo(255);
  return m;
}

std::set<int> values_in(const cv::Mat& m) {
  std::set<int> v;
  for (auto it = m.begin<std::uint8_t>(); it != m.end<std::uint8_t>(); ++it) v.insert(*it);
  return v;
}

RenderedElement text_element(ElementClass cls, std::vector<std::vector<std::string>> lines, cv::Point at,
                             cv::Size size, int px = 20, double rotation = 0.0) {
  TextStyle s;
  s.font = &demo_font("DejaVuSerif.ttf");
  s.size_px = px;
  s.rotation_deg = rotation;
  RenderedElement e = typeset_lines(cls, lines, s, size);
  e.placement = at;
  return e;
}

// A few rendered pages' worth of elements straight from the element module.
std::vector<RenderedElement> random_placements(std::uint64_t seed) {
  Rng rng(seed);
  LayoutConfig lc;
  const cv::Size page(700, 900);
  const GridLayout g = sample_layout(page, usable_area({{0, 0}, page}, lc.page_margin), rng, lc);
  std::vector<RenderedElement> out;
  for (const ElementSpec& s : flatten(fill_layout(g, rng, lc))) {
    Rng er(s.seed);
    try {
      out.push_back(render_element(s, demo_store(), er, {}));
    } catch (const Error&) {
    }
  }
  return out;
}

}  // namespace

TEST(Labels, AxisAlignedBand) {
  const LineMetrics l = horizontal_line(30, 40, 10, 110);
  const TextMasks m = label_text_lines(std::span(&l, 1), {200, 80}, {TextRepresentation::kXHeight, false}, {});
  EXPECT_EQ(cv::countNonZero(m.text != rect_mask({200, 80}, {10, 30, 101, 11})), 0);
  EXPECT_EQ(cv::countNonZero(m.border), 0);
}

TEST(Labels, BorderIsDilationRing) {
  const LineMetrics l = horizontal_line(30, 40, 10, 110);
  const TextMasks m = label_text_lines(std::span(&l, 1), {200, 80}, {TextRepresentation::kXHeight, true}, {}, 3);
  const cv::Mat text = rect_mask({200, 80}, {10, 30, 101, 11});
  cv::Mat grown;
  cv::dilate(text, grown, cv::getStructuringElement(cv::MORPH_RECT, {7, 7}));
  const cv::Mat ring = grown & ~text;
  EXPECT_EQ(cv::countNonZero(m.border != ring), 0);
  EXPECT_EQ(cv::countNonZero(m.border & m.text), 0);
  EXPECT_EQ(cv::countNonZero(m.text != text), 0);
}

TEST(Labels, FourPixelGapKeepsLinesApart) {
  const LineMetrics lines[] = {horizontal_line(30, 40, 10, 110), horizontal_line(45, 55, 10, 110)};
  const TextMasks m = label_text_lines(lines, {200, 80}, {TextRepresentation::kXHeight, true}, {}, 3);
  EXPECT_EQ(flood_fill_components(m.text).size(), 2u);
  EXPECT_EQ(cv::countNonZero(m.border & m.text), 0);
}

TEST(Labels, DefaultBorderThickness) {
  LabelConfig cfg;
  EXPECT_EQ(border_thickness_for(horizontal_line(30, 40, 0, 9), cfg), 2);   // 15% of 11 rounds to 2
  EXPECT_EQ(border_thickness_for(horizontal_line(10, 40, 0, 9), cfg), 5);   // 15% of 31 = 4.65
  EXPECT_EQ(border_thickness_for(horizontal_line(38, 40, 0, 9), cfg), 2);   // floor
}

TEST(Labels, BaselineModeStroke) {
  const LineMetrics l = horizontal_line(30, 40, 10, 110);
  const TextMasks m = label_text_lines(std::span(&l, 1), {200, 80}, {TextRepresentation::kBaseline, true}, {}, 2);
  EXPECT_EQ(cv::countNonZero(m.text != rect_mask({200, 80}, {10, 39, 101, 3})), 0);
  const cv::Mat ring = rect_mask({200, 80}, {8, 37, 105, 7}) & ~rect_mask({200, 80}, {10, 39, 101, 3});
  EXPECT_EQ(cv::countNonZero(m.border != ring), 0);
}

TEST(Labels, DegenerateLinesAreSkipped) {
  const LineMetrics bad[] = {horizontal_line(40, 40, 10, 110), horizontal_line(30, 40, 50, 20)};
  const TextMasks m = label_text_lines(bad, {200, 80}, {}, {});
  EXPECT_EQ(cv::countNonZero(m.text), 0);
  EXPECT_EQ(cv::countNonZero(m.border), 0);
}

TEST(Labels, RotatedBandFollowsLine) {
  LineMetrics l = horizontal_line(30, 40, 10, 110);
  l.to_element = rotation_about({60, 35}, 10.0);
  const TextMasks m = label_text_lines(std::span(&l, 1), {200, 120}, {TextRepresentation::kXHeight, true}, {});
  const auto poly = xheight_polygon(l);
  for (int y = 0; y < 120; ++y) {
    for (int x = 0; x < 200; ++x) {
      ASSERT_EQ(m.text.at<std::uint8_t>(y, x) != 0, point_in_polygon(poly, {double(x), double(y)}));
    }
  }
  EXPECT_EQ(cv::countNonZero(m.border & m.text), 0);
  EXPECT_GT(cv::countNonZero(m.border), 0);
}

TEST(Labels, ClosingKeepsSolidRectangle) {
  const cv::Mat r = rect_mask({60, 50}, {10, 10, 30, 20});
  EXPECT_EQ(cv::countNonZero(label_shape(r, 4) != r), 0);
  // Also when the rectangle touches the frame.
  const cv::Mat edge = rect_mask({60, 50}, {0, 0, 30, 50});
  EXPECT_EQ(cv::countNonZero(label_shape(edge, 4) != edge), 0);
}

TEST(Labels, ClosingFillsOutline) {
  for (int hole : {4, 6, 9}) {
    cv::Mat outline = cv::Mat::zeros(40, 40, CV_8UC1);
    cv::rectangle(outline, cv::Rect(8, 8, hole + 2, hole + 2), cv::Scalar(255), 1);
    const int radius = (hole + 1) / 2;
    const cv::Mat closed = label_shape(outline, radius);
    EXPECT_EQ(cv::countNonZero(closed != fill_holes(outline)), 0) << hole;
  }
}

TEST(Labels, ClosingOfEmptyIsEmpty) {
  EXPECT_EQ(cv::countNonZero(label_shape(cv::Mat::zeros(20, 20, CV_8UC1), 3)), 0);
}

TEST(Labels, ClosingRadiusDefault) {
  EXPECT_EQ(closing_radius_for({400, 300}, {}), 5);  // 1.5% of 300 = 4.5
  EXPECT_EQ(closing_radius_for({60, 60}, {}), 2);
}

TEST(Labels, EmptyPageIsBackground) {
  const LabelMap m = build_label_map({}, {64, 48}, TaxonomyKind::kFine, {}, {});
  EXPECT_EQ(m.width(), 64);
  EXPECT_EQ(m.height(), 48);
  EXPECT_EQ(cv::countNonZero(m.data), 0);
}

TEST(Labels, ParagraphClassInventory) {
  const std::vector<RenderedElement> els{
      text_element(ElementClass::kParagraph, {{"dominus", "vobiscum"}, {"et", "cum", "spiritu"}}, {20, 20}, {300, 90})};
  ASSERT_EQ(els[0].lines.size(), 2u);
  const LabelMap m = build_label_map(els, {400, 200}, TaxonomyKind::kCoarse, {}, {});
  EXPECT_EQ(values_in(m.data), (std::set<int>{kCoarseBackground, kCoarseText, kCoarseBorder}));
  const LabelMap f = build_label_map(els, {400, 200}, TaxonomyKind::kFine, {}, {});
  EXPECT_EQ(values_in(f.data), (std::set<int>{0, static_cast<int>(ElementClass::kParagraph), kFineBorder}));
}

TEST(Labels, TextWinsOverIllustration) {
  RenderedElement img = letterbox_image(cv::Mat(100, 100, CV_8UC3, cv::Scalar::all(90)), {100, 100});
  img.placement = {50, 50};
  RenderedElement cap = text_element(ElementClass::kCaption, {{"Figura", "prima"}}, {40, 130}, {160, 40}, 16);
  const std::vector<RenderedElement> els{img, cap};
  const LabelMap m = build_label_map(els, {300, 250}, TaxonomyKind::kFine, {}, {});
  const TextMasks t = label_text_lines(page_lines(cap), {300, 250}, {}, {});
  const cv::Mat img_area = rect_mask({300, 250}, {50, 50, 100, 100});
  const cv::Mat overlap = t.text & img_area;
  ASSERT_GT(cv::countNonZero(overlap), 0);
  EXPECT_EQ(cv::countNonZero((m.data != static_cast<int>(ElementClass::kCaption)) & overlap), 0);
  // Border also beats the illustration.
  const cv::Mat border_overlap = t.border & img_area;
  ASSERT_GT(cv::countNonZero(border_overlap), 0);
  EXPECT_EQ(cv::countNonZero((m.data != kFineBorder) & border_overlap), 0);
  // Image pixels away from the caption keep the image class.
  EXPECT_EQ(m.data.at<std::uint8_t>(60, 60), static_cast<int>(ElementClass::kImage));
}

TEST(Labels, ImagesUseFullExtentDrawingsUseClosing) {
  RenderedElement img = letterbox_image(cv::Mat(40, 80, CV_8UC3, cv::Scalar::all(250)), {80, 80});
  img.placement = {0, 0};
  cv::Mat art(80, 80, CV_8UC3, cv::Scalar::all(255));
  cv::rectangle(art, cv::Rect(20, 20, 40, 40), cv::Scalar::all(0), 2);
  RenderedElement drw = drawing_from_source(art, {80, 80}, {});
  drw.placement = {100, 0};
  const std::vector<RenderedElement> els{img, drw};
  LabelConfig cfg;
  const LabelMap m = build_label_map(els, {200, 80}, TaxonomyKind::kCoarse, {}, cfg);
  EXPECT_EQ(cv::countNonZero(m.data(cv::Rect(0, 0, 80, 80)) == kCoarseIllustration), cv::countNonZero(img.ink_mask));
  const cv::Mat shape = label_shape(drw.ink_mask, closing_radius_for({80, 80}, cfg));
  EXPECT_EQ(cv::countNonZero((m.data(cv::Rect(100, 0, 80, 80)) == kCoarseIllustration) != shape), 0);
}

TEST(Labels, BorderOnIllustrationsIsOptIn) {
  RenderedElement img = letterbox_image(cv::Mat(30, 30, CV_8UC3, cv::Scalar::all(10)), {30, 30});
  img.placement = {20, 20};
  const std::vector<RenderedElement> els{img};
  LabelConfig cfg;
  EXPECT_EQ(cv::countNonZero(build_label_map(els, {80, 80}, TaxonomyKind::kCoarse, {}, cfg).data == kCoarseBorder), 0);
  cfg.border_on_illustrations = true;
  const LabelMap m = build_label_map(els, {80, 80}, TaxonomyKind::kCoarse, {}, cfg);
  EXPECT_GT(cv::countNonZero(m.data == kCoarseBorder), 0);
  EXPECT_EQ(cv::countNonZero(m.data == kCoarseIllustration), 30 * 30);
}

TEST(Labels, FineCollapsesToCoarse) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto els = random_placements(seed);
    for (const TextLabelMode mode : {TextLabelMode{TextRepresentation::kXHeight, true},
                                     TextLabelMode{TextRepresentation::kBaseline, false}}) {
      const LabelMap fine = build_label_map(els, {700, 900}, TaxonomyKind::kFine, mode, {});
      const LabelMap coarse = build_label_map(els, {700, 900}, TaxonomyKind::kCoarse, mode, {});
      const LabelMap collapsed = collapse_to_coarse(fine);
      EXPECT_EQ(collapsed.taxonomy, TaxonomyKind::kCoarse);
      EXPECT_EQ(cv::countNonZero(collapsed.data != coarse.data), 0) << seed;
      double hi = 0;
      cv::minMaxLoc(fine.data, nullptr, &hi);
      EXPECT_LT(hi, LabelTaxonomy::fine().class_count());
      cv::minMaxLoc(coarse.data, nullptr, &hi);
      EXPECT_LT(hi, LabelTaxonomy::coarse().class_count());
    }
  }
}

TEST(Labels, HorizontalGroundTruthBaseline) {
  RenderedElement e;
  e.element_class = ElementClass::kParagraph;
  e.lines = {horizontal_line(30, 40, 10, 110)};
  const std::vector<RenderedElement> els{e};
  const auto b = ground_truth_baselines(els);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].front(), cv::Point2d(10, 40));
  EXPECT_EQ(b[0].back(), cv::Point2d(110, 40));
  EXPECT_EQ(b[0].size(), 101u);
}

TEST(Labels, RotatedGroundTruthBaseline) {
  RenderedElement e;
  e.element_class = ElementClass::kParagraph;
  LineMetrics l = horizontal_line(30, 40, 10, 110);
  const cv::Point2d c(60, 40);
  l.to_element = rotation_about(c, 5.0);
  e.lines = {l};
  e.placement = {7, 3};
  const std::vector<RenderedElement> els{e};
  const auto b = ground_truth_baselines(els);
  ASSERT_EQ(b.size(), 1u);
  const double rad = 5.0 * CV_PI / 180;
  // Counter-clockwise on screen: the right end rises.
  const cv::Point2d right(c.x + 50 * std::cos(rad) + 7, c.y - 50 * std::sin(rad) + 3);
  const cv::Point2d left(c.x - 50 * std::cos(rad) + 7, c.y + 50 * std::sin(rad) + 3);
  EXPECT_LT(cv::norm(b[0].front() - left), 1e-9);
  EXPECT_LT(cv::norm(b[0].back() - right), 1e-9);
  EXPECT_NEAR(polyline_length(b[0]), 100.0, 0.5);
}

TEST(Labels, OneBaselinePerRenderedLine) {
  const RenderedElement a =
      text_element(ElementClass::kParagraph, {{"a", "b"}, {"c"}, {"d", "e"}, {"f"}}, {0, 0}, {200, 200}, 18);
  const RenderedElement b = text_element(ElementClass::kTitle, {{"INCIPIT"}, {"LIBER"}}, {0, 250}, {300, 120}, 30);
  const RenderedElement c = text_element(ElementClass::kCaption, {{"fol.", "3r"}}, {250, 0}, {120, 40}, 12);
  ASSERT_EQ(a.lines.size() + b.lines.size() + c.lines.size(), 7u);
  const std::vector<RenderedElement> els{a, b, c};
  EXPECT_EQ(ground_truth_baselines(els).size(), 7u);
}

TEST(Labels, LinesRenderedWithBorderStaySeparate) {
  // Real typeset lines, tight spacing, several rotations.
  for (double deg : {0.0, 3.0, -4.5}) {
    TextStyle s;
    s.font = &demo_font("DejaVuSans.ttf");
    s.size_px = 16;
    s.line_spacing = 1.05;
    s.rotation_deg = deg;
    RenderedElement e = typeset_lines(ElementClass::kParagraph,
                                      {{"one", "line"}, {"two", "lines"}, {"three", "lines"}, {"four"}}, s, {300, 160});
    ASSERT_EQ(e.lines.size(), 4u);
    const std::vector<RenderedElement> els{e};
    const LabelMap m = build_label_map(els, {300, 160}, TaxonomyKind::kCoarse, {}, {});
    EXPECT_EQ(connected_components(m, kCoarseText).size(), 4u) << deg;
  }
}
