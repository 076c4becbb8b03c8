#include <gtest/gtest.h>

#include <cmath>
#include <opencv2/imgproc.hpp>
#include <set>

#include "docsynth/labels.hpp"
#include "docsynth/postproc.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace docsynth;
using namespace docsynth::testing;

namespace {

ConnectedComponent only_component(const cv::Mat& mask) {
  auto comps = connected_components(mask);
  EXPECT_EQ(comps.size(), 1u);
  return comps.empty() ? ConnectedComponent{} : comps.front();
}

cv::Mat band(cv::Size size, const std::function<double(double)>& f, double height, int left, int right,
             const Affine& to_page = identity_affine()) {
  return rasterize_by_points(size, curve_band_polygon(f, height, left, right, to_page));
}

double deg2rad(double d) { return d * CV_PI / 180.0; }

}  // namespace

TEST(Postproc, TwoBlocksTwoComponents) {
  cv::Mat m = cv::Mat::zeros(10, 12, CV_8UC1);
  m(cv::Rect(1, 1, 3, 3)).setTo(255);
  m(cv::Rect(7, 5, 3, 3)).setTo(255);
  const auto comps = connected_components(m);
  ASSERT_EQ(comps.size(), 2u);
  EXPECT_EQ(comps[0].area, 9);
  EXPECT_EQ(comps[1].area, 9);
  EXPECT_EQ(comps[0].bbox, cv::Rect(1, 1, 3, 3));
  EXPECT_EQ(comps[1].bbox, cv::Rect(7, 5, 3, 3));
}

TEST(Postproc, DiagonalNeighboursConnect) {
  cv::Mat m = cv::Mat::zeros(4, 4, CV_8UC1);
  m.at<std::uint8_t>(0, 0) = m.at<std::uint8_t>(1, 1) = m.at<std::uint8_t>(2, 2) = 255;
  m.at<std::uint8_t>(3, 0) = m.at<std::uint8_t>(2, 1) = 255;
  EXPECT_EQ(connected_components(m).size(), 1u);
}

TEST(Postproc, MatchesFloodFillOracle) {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const cv::Mat m = random_mask(rng, {20, 20}, rng.uniform(0.1, 0.7));
    const auto ours = connected_components(m);
    const auto oracle = flood_fill_components(m);
    ASSERT_EQ(ours.size(), oracle.size()) << trial;
    for (std::size_t i = 0; i < ours.size(); ++i) {
      ASSERT_EQ(ours[i].pixels(), oracle[i]) << trial;
      ASSERT_EQ(ours[i].area, static_cast<std::int64_t>(oracle[i].size()));
      ASSERT_EQ(ours[i].bbox, cv::boundingRect(oracle[i]));
    }
  }
}

TEST(Postproc, RunsAreSortedAndMaskMatches) {
  Rng rng(4);
  const cv::Mat m = random_mask(rng, {40, 30}, 0.5);
  const auto comps = connected_components(m, 7);
  cv::Mat rebuilt = cv::Mat::zeros(m.size(), CV_8UC1);
  for (const auto& c : comps) {
    EXPECT_EQ(c.class_index, 7);
    for (std::size_t i = 1; i < c.runs.size(); ++i) {
      const docsynth::Run& a = c.runs[i - 1];
      const docsynth::Run& b = c.runs[i];
      EXPECT_TRUE(a.y < b.y || (a.y == b.y && a.x_end + 1 < b.x_begin));
    }
    cv::Mat roi = rebuilt(c.bbox);
    roi.setTo(255, c.mask());
  }
  EXPECT_EQ(cv::countNonZero(rebuilt != (m > 0)), 0);
  const cv::Mat ids = component_id_image(comps, m.size());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    for (const auto& p : comps[i].pixels()) ASSERT_EQ(ids.at<int>(p), static_cast<int>(i) + 1);
  }
}

TEST(Postproc, LabelMapOverloadSelectsClass) {
  LabelMap map{cv::Mat::zeros(10, 10, CV_8UC1), TaxonomyKind::kCoarse};
  map.data(cv::Rect(0, 0, 3, 3)).setTo(kCoarseText);
  map.data(cv::Rect(3, 3, 3, 3)).setTo(kCoarseBorder);
  map.data(cv::Rect(7, 7, 2, 2)).setTo(kCoarseText);
  const auto text = connected_components(map, kCoarseText);
  ASSERT_EQ(text.size(), 2u);
  EXPECT_EQ(text[0].class_index, kCoarseText);
  EXPECT_EQ(connected_components(map, kCoarseBorder).size(), 1u);
}

TEST(Postproc, ZeroRatioKeepsAll) {
  Rng rng(1);
  const auto comps = connected_components(random_mask(rng, {30, 30}, 0.3), kCoarseText);
  EXPECT_EQ(filter_components(comps, {{kCoarseText, 0.0}}, 900).size(), comps.size());
}

TEST(Postproc, ThresholdArithmetic) {
  cv::Mat m = cv::Mat::zeros(100, 100, CV_8UC1);
  m(cv::Rect(0, 0, 10, 5)).setTo(255);    // 50
  m(cv::Rect(20, 20, 15, 10)).setTo(255); // 150
  const auto comps = connected_components(m, kCoarseText);
  const auto kept = filter_components(comps, {{kCoarseText, 0.01}}, 100 * 100);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].area, 150);
  // Classes without a threshold pass.
  EXPECT_EQ(filter_components(comps, {{kCoarseIllustration, 0.5}}, 100 * 100).size(), 2u);
}

TEST(Postproc, RaisingRatioNeverAddsComponents) {
  Rng rng(8);
  const auto comps = connected_components(random_mask(rng, {60, 60}, 0.45), 1);
  std::size_t previous = comps.size() + 1;
  for (double r = 0.0; r < 0.05; r += 0.0005) {
    const auto kept = filter_components(comps, {{1, r}}, 3600);
    EXPECT_LE(kept.size(), previous);
    previous = kept.size();
  }
}

TEST(Postproc, StraightBandBaseline) {
  const cv::Mat m = band({140, 70}, [](double) { return 40.0; }, 10, 10, 110);
  ASSERT_EQ(cv::boundingRect(m), cv::Rect(10, 30, 101, 11));
  const auto b = extract_baseline(only_component(m));
  ASSERT_TRUE(b);
  for (const auto& p : b->polyline) EXPECT_NEAR(p.y, 40.0, 0.5);
  EXPECT_NEAR(b->polyline.front().x, 10.0, 0.5);
  EXPECT_NEAR(b->polyline.back().x, 110.0, 0.5);
  EXPECT_NEAR(b->theta, 0.0, 1e-9);
}

TEST(Postproc, RotatedBandBaseline) {
  for (double deg : {5.0, -5.0, 15.0, -15.0}) {
    const Affine rot = rotation_about({160, 100}, deg);
    const cv::Mat m = band({320, 200}, [](double) { return 100.0; }, 10, 60, 260, rot);
    const auto b = extract_baseline(only_component(m));
    ASSERT_TRUE(b) << deg;
    EXPECT_NEAR(b->theta, -deg2rad(deg), deg2rad(0.5)) << deg;
    const cv::Point2d left = apply(rot, cv::Point2d(60, 100)), right = apply(rot, cv::Point2d(260, 100));
    EXPECT_LT(cv::norm(b->polyline.front() - left), 1.0) << deg;
    EXPECT_LT(cv::norm(b->polyline.back() - right), 1.0) << deg;
    EXPECT_LT(rms_distance(b->polyline, curve_points([](double) { return 100.0; }, 60, 260, rot)), 1.0);
  }
}

TEST(Postproc, SinusoidalBandBaseline) {
  const auto f = [](double x) { return 40.0 + 3.0 * std::sin(x / 30.0); };
  const cv::Mat m = band({260, 80}, f, 10, 10, 240);
  const auto b = extract_baseline(only_component(m));
  ASSERT_TRUE(b);
  const auto truth = curve_points(f, 10, 240, identity_affine());
  EXPECT_LT(rms_distance(truth, b->polyline), 1.0);
  EXPECT_LT(rms_distance(b->polyline, truth), 1.0);
  EXPECT_EQ(b->degree(), 5);
}

TEST(Postproc, PolylineSatisfiesPolynomial) {
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const double a = rng.uniform(-30, 30);
    const double amp = rng.uniform(0, 4);
    const auto f = [&](double x) { return 60.0 + amp * std::sin(x / 25.0); };
    const cv::Mat m = band({300, 160}, f, rng.uniform(4, 14), 40, 40 + rng.uniform_int(20, 200),
                           rotation_about({150, 60}, a));
    const auto comps = connected_components(m);
    ASSERT_FALSE(comps.empty());
    const auto b = extract_baseline(comps.front());
    ASSERT_TRUE(b);
    EXPECT_LT(b->u_min, b->u_max);
    for (const auto& p : b->polyline) {
      const cv::Point2d uv = b->to_frame(p);
      EXPECT_NEAR(uv.y, b->evaluate(uv.x), 0.5);
    }
  }
}

TEST(Postproc, RotationEquivariance) {
  const auto f = [](double x) { return 80.0 + 2.5 * std::sin(x / 35.0); };
  const cv::Size size(400, 300);
  const cv::Point2d center(200, 150);
  const auto base = extract_baseline(only_component(band(size, f, 11, 80, 320)));
  ASSERT_TRUE(base);
  for (double deg = -30; deg <= 30; deg += 5) {
    const Affine rot = rotation_about(center, deg);
    const auto turned = extract_baseline(only_component(band(size, f, 11, 80, 320, rot)));
    ASSERT_TRUE(turned) << deg;
    const auto expected = docsynth::apply(rot, std::span<const cv::Point2d>(base->polyline));
    EXPECT_LE(max_distance(turned->polyline, expected), 1.0) << deg;
    EXPECT_LE(max_distance(expected, turned->polyline), 1.0) << deg;
  }
}

TEST(Postproc, DegreeCapAndNarrowComponents) {
  Rng rng(12);
  for (int w = 1; w < 30; ++w) {
    cv::Mat m = cv::Mat::zeros(20, 40, CV_8UC1);
    m(cv::Rect(2, 5, w, 4)).setTo(255);
    const auto b = extract_baseline(only_component(m));
    if (w < 10) {
      EXPECT_FALSE(b) << w;
    } else {
      ASSERT_TRUE(b) << w;
      EXPECT_LE(b->degree(), 5);
      EXPECT_LE(b->degree(), w - 1);
    }
  }
  BaselineConfig cfg;
  cfg.min_width = 2;
  cv::Mat m = cv::Mat::zeros(10, 10, CV_8UC1);
  m(cv::Rect(2, 2, 3, 2)).setTo(255);
  const auto b = extract_baseline(only_component(m), cfg);
  ASSERT_TRUE(b);
  EXPECT_LE(b->degree(), 2);
}

TEST(Postproc, PrincipalOrientation) {
  std::vector<cv::Point> pts;
  for (int i = 0; i < 50; ++i) pts.emplace_back(i, i);
  cv::Point2d mean;
  EXPECT_NEAR(principal_orientation(pts, &mean), CV_PI / 4, 1e-12);
  EXPECT_NEAR(mean.x, 24.5, 1e-12);
}

TEST(Postproc, SolidBlockIllustration) {
  LabelMap map{cv::Mat::zeros(200, 200, CV_8UC1), TaxonomyKind::kCoarse};
  map.data(cv::Rect(40, 60, 50, 50)).setTo(kCoarseIllustration);
  const auto regions = extract_illustrations(map, kCoarseIllustration, 5e-4);
  ASSERT_EQ(regions.size(), 1u);
  EXPECT_EQ(regions[0].bbox, cv::Rect(40, 60, 50, 50));
  ASSERT_EQ(regions[0].contour.size(), 4u);
  std::set<std::pair<int, int>> corners;
  for (const auto& p : regions[0].contour) corners.insert({p.x, p.y});
  EXPECT_EQ(corners, (std::set<std::pair<int, int>>{{40, 60}, {89, 60}, {89, 109}, {40, 109}}));
}

TEST(Postproc, SmallIllustrationsAreFiltered) {
  LabelMap map{cv::Mat::zeros(200, 200, CV_8UC1), TaxonomyKind::kCoarse};
  map.data(cv::Rect(10, 10, 4, 4)).setTo(kCoarseIllustration);
  EXPECT_TRUE(extract_illustrations(map, kCoarseIllustration, 5e-4).empty());
}

TEST(Postproc, ContourRoundTrip) {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    // Blobby shapes: closed random masks.
    cv::Mat m = random_mask(rng, {120, 100}, 0.15);
    m = label_shape(m, 4);
    LabelMap map{cv::Mat::zeros(m.size(), CV_8UC1), TaxonomyKind::kCoarse};
    map.data.setTo(kCoarseIllustration, m);
    for (const auto& r : extract_illustrations(map, kCoarseIllustration, 0.0)) {
      const cv::Mat filled = contour_mask(r.contour, m.size());
      cv::Mat comp = cv::Mat::zeros(m.size(), CV_8UC1);
      comp(r.bbox).setTo(255, r.component.mask());
      const double covered = cv::countNonZero(filled & comp);
      EXPECT_GE(covered / static_cast<double>(r.component.area), 0.99) << trial;
    }
  }
}

TEST(Postproc, AnalyzeCollapsesFineMaps) {
  LabelMap fine{cv::Mat::zeros(300, 300, CV_8UC1), TaxonomyKind::kFine};
  fine.data(cv::Rect(20, 20, 200, 11)).setTo(static_cast<int>(ElementClass::kParagraph));
  fine.data(cv::Rect(20, 40, 200, 11)).setTo(static_cast<int>(ElementClass::kCaption));
  fine.data(cv::Rect(20, 60, 5, 5)).setTo(static_cast<int>(ElementClass::kTitle));
  fine.data(cv::Rect(100, 150, 80, 80)).setTo(static_cast<int>(ElementClass::kDrawing));
  fine.data(cv::Rect(200, 150, 40, 40)).setTo(static_cast<int>(ElementClass::kGlyph));
  PostprocConfig cfg;
  const PageAnalysis a = analyze_page(fine, cfg);
  EXPECT_EQ(a.text.found, 3);
  EXPECT_EQ(a.text.kept, 3);  // 25 px is above 5e-5 of 90000 = 4.5 px
  EXPECT_EQ(a.baselines.size(), 2u);
  EXPECT_EQ(a.too_narrow, 1);
  EXPECT_EQ(a.illustration.found, 2);
  EXPECT_EQ(a.illustrations.size(), 2u);
  EXPECT_NEAR(a.baselines[0].polyline.front().y, 30.0, 0.5);
  EXPECT_NEAR(a.baselines[1].polyline.front().y, 50.0, 0.5);
}
