#include "docsynth/metrics.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>

#include "docsynth/error.hpp"
#include "docsynth/geometry.hpp"
#include "docsynth/image_io.hpp"

namespace docsynth {

namespace fs = std::filesystem;
using nlohmann::json;

IouCounts iou_counts(const cv::Mat& pred, const cv::Mat& gt, std::uint8_t class_index) {
  if (pred.size() != gt.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "label maps differ in size: " + std::to_string(pred.cols) + "x" +
                                                   std::to_string(pred.rows) + " vs " + std::to_string(gt.cols) +
                                                   "x" + std::to_string(gt.rows));
  }
  const cv::Mat p = pred == class_index;
  const cv::Mat g = gt == class_index;
  cv::Mat both, either;
  cv::bitwise_and(p, g, both);
  cv::bitwise_or(p, g, either);
  return {cv::countNonZero(both), cv::countNonZero(either)};
}

double iou(const LabelMap& pred, const LabelMap& gt, std::uint8_t class_index) {
  return iou_counts(pred.data, gt.data, class_index).value();
}

BaselineCounts& BaselineCounts::operator+=(const BaselineCounts& o) {
  pred_points += o.pred_points;
  pred_covered += o.pred_covered;
  gt_points += o.gt_points;
  gt_covered += o.gt_covered;
  pred_lines += o.pred_lines;
  gt_lines += o.gt_lines;
  matched_lines += o.matched_lines;
  return *this;
}

PRF prf_from_counts(const BaselineCounts& c) {
  PRF r;
  r.precision = c.pred_points == 0 ? 1.0 : static_cast<double>(c.pred_covered) / static_cast<double>(c.pred_points);
  if (c.gt_points == 0) r.recall = c.pred_points == 0 ? 1.0 : 0.0;
  else r.recall = static_cast<double>(c.gt_covered) / static_cast<double>(c.gt_points);
  const double sum = r.precision + r.recall;
  r.fvalue = sum > 0 ? 2.0 * r.precision * r.recall / sum : 0.0;
  return r;
}

namespace {

constexpr double kToleranceFloor = 5.0;
constexpr double kToleranceFactor = 0.25;

cv::Rect2d bounds(const Polyline& line) {
  double x0 = line[0].x, x1 = x0, y0 = line[0].y, y1 = y0;
  for (const auto& p : line) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return {x0, y0, x1 - x0, y1 - y0};
}

bool near(const cv::Rect2d& a, const cv::Rect2d& b, double tol) {
  return a.x - tol <= b.x + b.width && b.x - tol <= a.x + a.width && a.y - tol <= b.y + b.height &&
         b.y - tol <= a.y + a.height;
}

std::int64_t covered(const Polyline& points, const Polyline& target, double tol) {
  std::int64_t n = 0;
  for (const auto& p : points) n += distance_to_polyline(p, target) <= tol ? 1 : 0;
  return n;
}

std::vector<Polyline> resample_all(std::span<const Polyline> lines) {
  std::vector<Polyline> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(l.size() >= 2 ? resample_polyline(l, 1.0) : l);
  return out;
}

}  // namespace

double auto_tolerance(std::span<const Polyline> gt) {
  std::vector<double> gaps;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i].empty()) continue;
    const cv::Point2d mid = gt[i][gt[i].size() / 2];
    double best = INFINITY;
    for (std::size_t j = 0; j < gt.size(); ++j) {
      if (j == i || gt[j].empty()) continue;
      best = std::min(best, distance_to_polyline(mid, gt[j]));
    }
    if (std::isfinite(best)) gaps.push_back(best);
  }
  if (gaps.empty()) return kToleranceFloor;
  std::nth_element(gaps.begin(), gaps.begin() + static_cast<long>(gaps.size() / 2), gaps.end());
  return std::max(kToleranceFloor, kToleranceFactor * gaps[gaps.size() / 2]);
}

BaselineCounts baseline_counts(std::span<const Polyline> pred_in, std::span<const Polyline> gt_in, double tolerance) {
  const auto pred = resample_all(pred_in);
  const auto gt = resample_all(gt_in);
  BaselineCounts counts;
  counts.pred_lines = static_cast<int>(pred.size());
  counts.gt_lines = static_cast<int>(gt.size());
  for (const auto& l : pred) counts.pred_points += static_cast<std::int64_t>(l.size());
  for (const auto& l : gt) counts.gt_points += static_cast<std::int64_t>(l.size());

  struct Pair {
    std::int64_t score, gt_cov, pred_cov;
    std::size_t p, g;
  };
  std::vector<Pair> pairs;
  std::vector<cv::Rect2d> gt_bounds;
  for (const auto& l : gt) gt_bounds.push_back(l.empty() ? cv::Rect2d() : bounds(l));
  for (std::size_t p = 0; p < pred.size(); ++p) {
    if (pred[p].empty()) continue;
    const cv::Rect2d pb = bounds(pred[p]);
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (gt[g].empty() || !near(pb, gt_bounds[g], tolerance)) continue;
      const std::int64_t gc = covered(gt[g], pred[p], tolerance);
      const std::int64_t pc = covered(pred[p], gt[g], tolerance);
      if (gc + pc > 0) pairs.push_back({gc + pc, gc, pc, p, g});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.score > b.score; });
  std::vector<bool> pred_used(pred.size()), gt_used(gt.size());
  for (const Pair& pair : pairs) {
    if (pred_used[pair.p] || gt_used[pair.g]) continue;
    pred_used[pair.p] = gt_used[pair.g] = true;
    counts.gt_covered += pair.gt_cov;
    counts.pred_covered += pair.pred_cov;
    ++counts.matched_lines;
  }
  return counts;
}

PRF baseline_prf(std::span<const Polyline> pred, std::span<const Polyline> gt, std::optional<double> tolerance) {
  return prf_from_counts(baseline_counts(pred, gt, tolerance.value_or(auto_tolerance(gt))));
}

namespace {

json counts_json(const BaselineCounts& c) {
  return {{"pred_points", c.pred_points}, {"pred_covered", c.pred_covered}, {"gt_points", c.gt_points},
          {"gt_covered", c.gt_covered},   {"pred_lines", c.pred_lines},     {"gt_lines", c.gt_lines},
          {"matched_lines", c.matched_lines}};
}

BaselineCounts counts_from(const json& j) {
  BaselineCounts c;
  c.pred_points = j.at("pred_points");
  c.pred_covered = j.at("pred_covered");
  c.gt_points = j.at("gt_points");
  c.gt_covered = j.at("gt_covered");
  c.pred_lines = j.at("pred_lines");
  c.gt_lines = j.at("gt_lines");
  c.matched_lines = j.at("matched_lines");
  return c;
}

json prf_json(const PRF& r) { return {{"precision", r.precision}, {"recall", r.recall}, {"fvalue", r.fvalue}}; }

PRF prf_from(const json& j) { return {j.at("precision"), j.at("recall"), j.at("fvalue")}; }

json iou_json(const std::map<int, double>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[std::to_string(k)] = v;
  return out;
}

std::map<int, double> iou_from(const json& j) {
  std::map<int, double> out;
  for (const auto& [k, v] : j.items()) out[std::stoi(k)] = v.get<double>();
  return out;
}

}  // namespace

json to_json(const EvalReport& r) {
  json pages = json::array();
  for (const auto& p : r.pages) {
    pages.push_back({{"name", p.name},
                     {"iou", iou_json(p.iou)},
                     {"baseline", prf_json(p.prf)},
                     {"tolerance", p.tolerance},
                     {"counts", counts_json(p.counts)}});
  }
  return {{"version", EvalReport::kVersion},
          {"scheme", EvalReport::kScheme},
          {"aggregation", EvalReport::kAggregation},
          {"mode", r.mode == EvalMode::kSegmentation ? "seg" : "baseline"},
          {"per_class_iou", iou_json(r.per_class_iou)},
          {"miou", r.miou},
          {"baseline", prf_json(r.baseline)},
          {"counts", counts_json(r.counts)},
          {"tolerance", r.tolerance ? json(*r.tolerance) : json("auto")},
          {"pages", pages},
          {"unpaired", r.unpaired}};
}

EvalReport report_from_json(const json& j) {
  if (j.at("version").get<int>() != EvalReport::kVersion) {
    throw Error(ErrorCode::kFormatError, "unsupported report version " + j.at("version").dump());
  }
  EvalReport r;
  r.mode = j.at("mode") == "seg" ? EvalMode::kSegmentation : EvalMode::kBaseline;
  r.per_class_iou = iou_from(j.at("per_class_iou"));
  r.miou = j.at("miou");
  r.baseline = prf_from(j.at("baseline"));
  r.counts = counts_from(j.at("counts"));
  if (j.at("tolerance").is_number()) r.tolerance = j.at("tolerance").get<double>();
  for (const auto& p : j.at("pages")) {
    r.pages.push_back({p.at("name"), iou_from(p.at("iou")), prf_from(p.at("baseline")), p.at("tolerance"),
                       counts_from(p.at("counts"))});
  }
  r.unpaired = j.at("unpaired").get<std::vector<std::string>>();
  return r;
}

std::vector<Polyline> read_baselines_json(const json& j) {
  const json& list = j.is_object() ? j.at("baselines") : j;
  std::vector<Polyline> out;
  for (const auto& line : list) {
    Polyline poly;
    for (const auto& pt : line) poly.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
    out.push_back(std::move(poly));
  }
  return out;
}

namespace {

std::map<std::string, fs::path> files_by_name(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIoError, "not a directory: " + dir.string());
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) out[entry.path().filename().string()] = entry.path();
  }
  return out;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, path.string() + ": " + e.what());
  }
}

}  // namespace

EvalReport evaluate_dataset(const fs::path& pred_dir, const fs::path& gt_dir, const EvalOptions& options) {
  const std::string ext = options.mode == EvalMode::kSegmentation ? ".png" : ".json";
  const auto pred = files_by_name(pred_dir, ext);
  const auto gt = files_by_name(gt_dir, ext);

  EvalReport report;
  report.mode = options.mode;
  report.tolerance = options.tolerance;
  for (const auto& [name, path] : pred) {
    if (!gt.contains(name)) report.unpaired.push_back(name);
  }
  for (const auto& [name, path] : gt) {
    if (!pred.contains(name)) report.unpaired.push_back(name);
  }
  std::sort(report.unpaired.begin(), report.unpaired.end());
  for (const auto& name : report.unpaired) spdlog::warn("UnpairedFile {} skipped", name);

  std::map<int, IouCounts> pooled;
  for (const auto& [name, gt_path] : gt) {
    const auto it = pred.find(name);
    if (it == pred.end()) continue;
    PageReport page{name, {}, {}, 0.0, {}};
    if (options.mode == EvalMode::kSegmentation) {
      const cv::Mat p = read_label_png(it->second);
      const cv::Mat g = read_label_png(gt_path);
      std::set<int> classes(options.classes.begin(), options.classes.end());
      if (classes.empty()) {
        for (const cv::Mat* m : {&p, &g}) {
          std::array<bool, 256> seen{};
          for (int y = 0; y < m->rows; ++y) {
            const auto* row = m->ptr<std::uint8_t>(y);
            for (int x = 0; x < m->cols; ++x) seen[row[x]] = true;
          }
          for (int c = 0; c < 256; ++c) {
            if (seen[c]) classes.insert(c);
          }
        }
      }
      for (int c : classes) {
        const IouCounts counts = iou_counts(p, g, static_cast<std::uint8_t>(c));
        page.iou[c] = counts.value();
        pooled[c] += counts;
      }
    } else {
      const auto p = read_baselines_json(read_json_file(it->second));
      const auto g = read_baselines_json(read_json_file(gt_path));
      page.tolerance = options.tolerance.value_or(auto_tolerance(g));
      page.counts = baseline_counts(p, g, page.tolerance);
      page.prf = prf_from_counts(page.counts);
      report.counts += page.counts;
    }
    report.pages.push_back(std::move(page));
  }

  if (options.mode == EvalMode::kSegmentation) {
    double sum = 0.0;
    for (const auto& [c, counts] : pooled) {
      report.per_class_iou[c] = counts.value();
      sum += counts.value();
    }
    report.miou = pooled.empty() ? 0.0 : sum / static_cast<double>(pooled.size());
  } else {
    report.baseline = prf_from_counts(report.counts);
  }
  return report;
}

}  // namespace docsynth
