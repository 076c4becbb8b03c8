#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <fstream>

#include "docsynth/error.hpp"
#include "docsynth/image_io.hpp"
#include "docsynth/metrics.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace docsynth;
using namespace docsynth::testing;

namespace {

LabelMap blank(int w = 10, int h = 10) { return {cv::Mat::zeros(h, w, CV_8UC1), TaxonomyKind::kCoarse}; }

Polyline hline(double y, double x0, double x1) { return {{x0, y}, {x1, y}}; }

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { std::ofstream(path) << j.dump(); }

nlohmann::json lines_json(const std::vector<Polyline>& lines) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& l : lines) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : l) pts.push_back({p.x, p.y});
    out.push_back(pts);
  }
  return out;
}

}  // namespace

TEST(Metrics, IouIdentical) {
  LabelMap a = blank();
  a.data(cv::Rect(2, 2, 5, 5)).setTo(kCoarseText);
  EXPECT_DOUBLE_EQ(iou(a, a, kCoarseText), 1.0);
}

TEST(Metrics, IouDisjoint) {
  LabelMap a = blank(), b = blank();
  a.data(cv::Rect(0, 0, 5, 10)).setTo(kCoarseText);
  b.data(cv::Rect(5, 0, 5, 10)).setTo(kCoarseText);
  EXPECT_DOUBLE_EQ(iou(a, b, kCoarseText), 0.0);
}

TEST(Metrics, IouHalf) {
  LabelMap pred = blank(), gt = blank();
  pred.data(cv::Rect(0, 0, 5, 10)).setTo(kCoarseText);
  gt.data.setTo(kCoarseText);
  EXPECT_DOUBLE_EQ(iou(pred, gt, kCoarseText), 0.5);
  const IouCounts c = iou_counts(pred.data, gt.data, kCoarseText);
  EXPECT_EQ(c.intersection, 50);
  EXPECT_EQ(c.union_, 100);
}

TEST(Metrics, IouBothEmptyIsOne) { EXPECT_DOUBLE_EQ(iou(blank(), blank(), kCoarseBorder), 1.0); }

TEST(Metrics, IouDimensionMismatch) {
  try {
    iou(blank(10, 10), blank(11, 10), kCoarseText);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(Metrics, IouSymmetric) {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    LabelMap a = blank(32, 24), b = blank(32, 24);
    a.data.setTo(kCoarseText, random_mask(rng, {32, 24}, rng.uniform()));
    b.data.setTo(kCoarseText, random_mask(rng, {32, 24}, rng.uniform()));
    EXPECT_EQ(iou(a, b, kCoarseText), iou(b, a, kCoarseText));
  }
}

TEST(Metrics, FvalueDefinition) {
  BaselineCounts c;
  c.pred_points = 10;
  c.pred_covered = 6;
  c.gt_points = 20;
  c.gt_covered = 5;
  const PRF r = prf_from_counts(c);
  EXPECT_DOUBLE_EQ(r.precision, 0.6);
  EXPECT_DOUBLE_EQ(r.recall, 0.25);
  EXPECT_DOUBLE_EQ(r.fvalue, 2 * 0.6 * 0.25 / 0.85);
  c.pred_covered = 0;
  c.gt_covered = 0;
  EXPECT_DOUBLE_EQ(prf_from_counts(c).fvalue, 0.0);
}

TEST(Metrics, PerfectPrediction) {
  const std::vector<Polyline> gt{hline(40, 10, 200), hline(80, 10, 180), {{10, 120}, {100, 125}, {190, 118}}};
  EXPECT_EQ(baseline_prf(gt, gt, std::nullopt), (PRF{1.0, 1.0, 1.0}));
  EXPECT_EQ(baseline_prf(gt, gt, 1.0), (PRF{1.0, 1.0, 1.0}));
}

TEST(Metrics, EmptyPrediction) {
  const std::vector<Polyline> gt{hline(40, 10, 200)};
  EXPECT_EQ(baseline_prf({}, gt, std::nullopt), (PRF{1.0, 0.0, 0.0}));
}

TEST(Metrics, EmptyGroundTruth) {
  EXPECT_EQ(baseline_prf({}, {}, std::nullopt), (PRF{1.0, 1.0, 1.0}));
  const std::vector<Polyline> pred{hline(40, 10, 200)};
  EXPECT_EQ(baseline_prf(pred, {}, std::nullopt).recall, 0.0);
}

TEST(Metrics, ToleranceThreshold) {
  const std::vector<Polyline> gt{hline(40, 0, 100)};
  for (double tol : {3.0, 5.0, 8.0}) {
    const std::vector<Polyline> far{hline(40 + tol + 2, 0, 100)};
    const std::vector<Polyline> close{hline(40 + tol - 2, 0, 100)};
    EXPECT_EQ(baseline_prf(far, gt, tol), (PRF{0.0, 0.0, 0.0})) << tol;
    EXPECT_EQ(baseline_prf(close, gt, tol), (PRF{1.0, 1.0, 1.0})) << tol;
  }
  // Single line: auto tolerance is the 5 px floor.
  EXPECT_DOUBLE_EQ(auto_tolerance(gt), 5.0);
  EXPECT_EQ(baseline_prf(std::vector<Polyline>{hline(47, 0, 100)}, gt, std::nullopt), (PRF{0.0, 0.0, 0.0}));
  EXPECT_EQ(baseline_prf(std::vector<Polyline>{hline(43, 0, 100)}, gt, std::nullopt), (PRF{1.0, 1.0, 1.0}));
}

TEST(Metrics, AutoToleranceFromInterlineDistance) {
  std::vector<Polyline> gt;
  for (int i = 0; i < 6; ++i) gt.push_back(hline(50 + 40.0 * i, 0, 300));
  EXPECT_DOUBLE_EQ(auto_tolerance(gt), 10.0);
  gt = {hline(50, 0, 300), hline(60, 0, 300)};
  EXPECT_DOUBLE_EQ(auto_tolerance(gt), 5.0);
}

TEST(Metrics, MatchingIsOneToOne) {
  // Two predictions on one gt line: only one may claim it.
  const std::vector<Polyline> gt{hline(40, 0, 100)};
  const std::vector<Polyline> pred{hline(40, 0, 100), hline(41, 0, 100)};
  const BaselineCounts c = baseline_counts(pred, gt, 5.0);
  EXPECT_EQ(c.matched_lines, 1);
  EXPECT_EQ(c.gt_covered, c.gt_points);
  EXPECT_EQ(c.pred_covered * 2, c.pred_points);
}

TEST(Metrics, PartialCoverage) {
  const std::vector<Polyline> gt{hline(40, 0, 100)};
  const std::vector<Polyline> pred{hline(40, 0, 50)};
  const BaselineCounts c = baseline_counts(pred, gt, 0.5);
  EXPECT_EQ(c.gt_points, 101);
  EXPECT_EQ(c.pred_points, 51);
  EXPECT_EQ(c.gt_covered, 51);
  EXPECT_EQ(c.pred_covered, 51);
}

namespace {

std::vector<Polyline> random_lines(Rng& rng, int n) {
  std::vector<Polyline> out;
  for (int i = 0; i < n; ++i) {
    const double y = 30 + 35.0 * i + rng.uniform(-4, 4);
    const double x0 = rng.uniform(0, 60);
    Polyline l;
    for (double x = x0; x < x0 + rng.uniform(60, 300); x += 20) l.emplace_back(x, y + rng.uniform(-2, 2));
    out.push_back(l);
  }
  return out;
}

std::vector<Polyline> jitter(Rng& rng, const std::vector<Polyline>& lines, double amount) {
  std::vector<Polyline> out;
  for (const auto& l : lines) {
    if (rng.bernoulli(0.2)) continue;
    Polyline m;
    for (const auto& p : l) m.emplace_back(p.x + rng.uniform(-amount, amount), p.y + rng.uniform(-amount, amount));
    out.push_back(m);
  }
  return out;
}

}  // namespace

TEST(Metrics, AddingCorrectLineNeverLowersRecall) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto gt = random_lines(rng, rng.uniform_int(2, 8));
    auto pred = jitter(rng, gt, 6);
    const double tol = rng.uniform(2, 8);
    const double before = baseline_prf(pred, gt, tol).recall;
    pred.push_back(gt[rng.index(gt.size())]);
    EXPECT_GE(baseline_prf(pred, gt, tol).recall, before - 1e-12) << trial;
  }
}

TEST(Metrics, AddingSpuriousLineNeverRaisesPrecision) {
  Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const auto gt = random_lines(rng, rng.uniform_int(2, 8));
    auto pred = jitter(rng, gt, 6);
    const double tol = rng.uniform(2, 8);
    const double before = baseline_prf(pred, gt, tol).precision;
    pred.push_back(hline(1000 + rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(150, 300)));
    EXPECT_LE(baseline_prf(pred, gt, tol).precision, before + 1e-12) << trial;
  }
}

TEST(Metrics, ToleranceMonotonicity) {
  Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const auto gt = random_lines(rng, rng.uniform_int(1, 8));
    const auto pred = jitter(rng, gt, 8);
    PRF prev{0, 0, 0};
    for (double tol = 0.5; tol <= 20; tol += 0.5) {
      const PRF r = baseline_prf(pred, gt, tol);
      EXPECT_GE(r.precision, prev.precision - 1e-12) << trial << " " << tol;
      EXPECT_GE(r.recall, prev.recall - 1e-12) << trial << " " << tol;
      prev = r;
    }
  }
}

TEST(Metrics, SegmentationDatasetPerfect) {
  const auto pred = fresh_dir("metrics_seg_pred");
  const auto gt = fresh_dir("metrics_seg_gt");
  Rng rng(9);
  const auto& pal = LabelTaxonomy::coarse().palette();
  for (int i = 0; i < 3; ++i) {
    cv::Mat m = cv::Mat::zeros(40, 50, CV_8UC1);
    m.setTo(kCoarseText, random_mask(rng, m.size(), 0.3));
    m.setTo(kCoarseIllustration, random_mask(rng, m.size(), 0.2));
    const std::string name = "page" + std::to_string(i) + ".png";
    write_label_png(pred / name, m, pal);
    write_label_png(gt / name, m, pal);
  }
  write_label_png(pred / "extra.png", cv::Mat::zeros(4, 4, CV_8UC1), pal);
  const EvalReport r = evaluate_dataset(pred, gt, {});
  EXPECT_EQ(r.pages.size(), 3u);
  EXPECT_EQ(r.unpaired, std::vector<std::string>{"extra.png"});
  EXPECT_DOUBLE_EQ(r.miou, 1.0);
  for (const auto& [c, v] : r.per_class_iou) EXPECT_DOUBLE_EQ(v, 1.0) << c;
  EXPECT_EQ(r.per_class_iou.size(), 3u);

  EvalOptions only;
  only.classes = {kCoarseIllustration};
  const EvalReport o = evaluate_dataset(pred, gt, only);
  ASSERT_EQ(o.per_class_iou.size(), 1u);
  EXPECT_TRUE(o.per_class_iou.contains(kCoarseIllustration));
}

TEST(Metrics, SegmentationPoolsPixels) {
  const auto pred = fresh_dir("metrics_pool_pred");
  const auto gt = fresh_dir("metrics_pool_gt");
  const auto& pal = LabelTaxonomy::coarse().palette();
  // Page a: 10 gt pixels, 10 predicted, all correct. Page b: 90 gt, 0 predicted.
  cv::Mat ga = cv::Mat::zeros(10, 10, CV_8UC1), gb = ga.clone(), pb = ga.clone();
  ga(cv::Rect(0, 0, 10, 1)).setTo(kCoarseText);
  gb(cv::Rect(0, 0, 10, 9)).setTo(kCoarseText);
  write_label_png(gt / "a.png", ga, pal);
  write_label_png(pred / "a.png", ga, pal);
  write_label_png(gt / "b.png", gb, pal);
  write_label_png(pred / "b.png", pb, pal);
  EvalOptions opt;
  opt.classes = {kCoarseText};
  const EvalReport r = evaluate_dataset(pred, gt, opt);
  EXPECT_DOUBLE_EQ(r.per_class_iou.at(kCoarseText), 10.0 / 100.0);  // pooled, not the page mean 0.5
  EXPECT_DOUBLE_EQ(r.miou, 0.1);
}

TEST(Metrics, BaselinePoolingAcrossPages) {
  const auto pred = fresh_dir("metrics_bl_pred");
  const auto gt = fresh_dir("metrics_bl_gt");
  const std::vector<Polyline> a{hline(40, 0, 100), hline(90, 0, 60)};  // 101 + 61 points
  const std::vector<Polyline> b{hline(40, 0, 200)};                     // 201 points
  write_json(gt / "a.json", lines_json(a));
  write_json(pred / "a.json", {{"baselines", lines_json(a)}});
  write_json(gt / "b.json", lines_json(b));
  write_json(pred / "b.json", nlohmann::json::array());
  EvalOptions opt;
  opt.mode = EvalMode::kBaseline;
  const EvalReport r = evaluate_dataset(pred, gt, opt);
  ASSERT_EQ(r.pages.size(), 2u);
  EXPECT_EQ(r.counts.gt_points, 363);
  const double expected_r = (1.0 * 162 + 0.0 * 201) / 363.0;
  EXPECT_DOUBLE_EQ(r.baseline.recall, expected_r);
  EXPECT_DOUBLE_EQ(r.baseline.precision, 1.0);
  EXPECT_EQ(r.pages[0].prf, (PRF{1.0, 1.0, 1.0}));
  EXPECT_EQ(r.pages[1].prf, (PRF{1.0, 0.0, 0.0}));
}

TEST(Metrics, BaselineDatasetPerfect) {
  const auto pred = fresh_dir("metrics_blp_pred");
  const auto gt = fresh_dir("metrics_blp_gt");
  Rng rng(2);
  for (int i = 0; i < 4; ++i) {
    const auto lines = random_lines(rng, 5);
    write_json(gt / ("p" + std::to_string(i) + ".json"), lines_json(lines));
    write_json(pred / ("p" + std::to_string(i) + ".json"), lines_json(lines));
  }
  EvalOptions opt;
  opt.mode = EvalMode::kBaseline;
  const EvalReport r = evaluate_dataset(pred, gt, opt);
  EXPECT_EQ(r.baseline, (PRF{1.0, 1.0, 1.0}));
  EXPECT_EQ(r.counts.matched_lines, 20);
}

TEST(Metrics, ReportJsonRoundTrip) {
  EvalReport r;
  r.mode = EvalMode::kBaseline;
  r.per_class_iou = {{1, 0.25}, {3, 0.75}};
  r.miou = 0.5;
  r.baseline = {0.9, 0.8, 2 * 0.72 / 1.7};
  r.counts.pred_points = 7;
  r.counts.matched_lines = 2;
  r.tolerance = 6.5;
  r.pages.push_back({"x.json", {{1, 0.125}}, {1, 0.5, 2.0 / 3.0}, 6.5, r.counts});
  r.unpaired = {"y.json"};
  const auto j = to_json(r);
  EXPECT_EQ(j.at("scheme"), "approx-cBAD");
  EXPECT_EQ(j.at("aggregation"), "pooled");
  EXPECT_EQ(report_from_json(nlohmann::json::parse(j.dump())), r);
  r.tolerance.reset();
  EXPECT_EQ(report_from_json(to_json(r)), r);
}

TEST(Metrics, ReadsBothBaselineShapes) {
  const nlohmann::json bare = nlohmann::json::parse("[[[0,1],[2,3]]]");
  const nlohmann::json wrapped = {{"baselines", bare}};
  const auto a = read_baselines_json(bare);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0], (Polyline{{0, 1}, {2, 3}}));
  EXPECT_EQ(read_baselines_json(wrapped), a);
}
