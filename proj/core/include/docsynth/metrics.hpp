#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "docsynth/labels.hpp"

namespace docsynth {

/// IoU of one class; 1 when the class is absent from both maps.
double iou(const LabelMap& pred, const LabelMap& gt, std::uint8_t class_index);

/// Pooled intersection and union pixel counts for one class.
struct IouCounts {
  std::int64_t intersection = 0;
  std::int64_t union_ = 0;

  double value() const { return union_ == 0 ? 1.0 : static_cast<double>(intersection) / static_cast<double>(union_); }
  IouCounts& operator+=(const IouCounts& o) {
    intersection += o.intersection;
    union_ += o.union_;
    return *this;
  }
};

IouCounts iou_counts(const cv::Mat& pred, const cv::Mat& gt, std::uint8_t class_index);

/// Point counts behind baseline precision and recall.
struct BaselineCounts {
  std::int64_t pred_points = 0;
  std::int64_t pred_covered = 0;
  std::int64_t gt_points = 0;
  std::int64_t gt_covered = 0;
  int pred_lines = 0;
  int gt_lines = 0;
  int matched_lines = 0;

  BaselineCounts& operator+=(const BaselineCounts& o);
  friend bool operator==(const BaselineCounts&, const BaselineCounts&) = default;
};

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double fvalue = 0.0;

  friend bool operator==(const PRF&, const PRF&) = default;
};

/// P/R/F from pooled counts. No predicted points gives P = 1; no gt points
/// gives R = 1 when there are no predictions either, else R = 0.
PRF prf_from_counts(const BaselineCounts& counts);

/// Tolerance used when none is given: max(5, 0.25 * median distance between
/// vertically adjacent gt lines).
double auto_tolerance(std::span<const Polyline> gt);

/// Resamples both sets at 1-px steps, greedily pairs lines one-to-one by
/// coverage score, and counts points within `tolerance` of their partner.
BaselineCounts baseline_counts(std::span<const Polyline> pred, std::span<const Polyline> gt, double tolerance);

PRF baseline_prf(std::span<const Polyline> pred, std::span<const Polyline> gt, std::optional<double> tolerance);

enum class EvalMode : std::uint8_t { kSegmentation, kBaseline };

struct PageReport {
  std::string name;
  std::map<int, double> iou;  // segmentation
  PRF prf;                    // baseline
  double tolerance = 0.0;
  BaselineCounts counts;

  friend bool operator==(const PageReport&, const PageReport&) = default;
};

struct EvalReport {
  static constexpr int kVersion = 1;
  static constexpr const char* kScheme = "approx-cBAD";
  static constexpr const char* kAggregation = "pooled";

  EvalMode mode = EvalMode::kSegmentation;
  std::map<int, double> per_class_iou;
  double miou = 0.0;
  PRF baseline;
  BaselineCounts counts;
  std::optional<double> tolerance;  // unset = auto per page
  std::vector<PageReport> pages;
  std::vector<std::string> unpaired;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

nlohmann::json to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

struct EvalOptions {
  EvalMode mode = EvalMode::kSegmentation;
  /// Classes scored in segmentation mode; empty means every class seen.
  std::vector<int> classes;
  std::optional<double> tolerance;
};

/// Segmentation: palette label PNGs paired by file name.
/// Baseline: JSON files paired by file name, each either a bare list of
/// polylines or an object with a "baselines" list.
EvalReport evaluate_dataset(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                            const EvalOptions& options);

/// Polylines from a baseline JSON document in either accepted shape.
std::vector<Polyline> read_baselines_json(const nlohmann::json& j);

}  // namespace docsynth
