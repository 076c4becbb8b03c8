#pragma once

#include <opencv2/core.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "docsynth/labels.hpp"

namespace docsynth {

/// Horizontal pixel run [x_begin, x_end] on row `y`, both ends inclusive.
struct Run {
  int y = 0;
  int x_begin = 0;
  int x_end = 0;

  int length() const { return x_end - x_begin + 1; }
  friend bool operator==(const Run&, const Run&) = default;
};

struct ConnectedComponent {
  std::uint8_t class_index = 0;
  std::vector<Run> runs;  // sorted by (y, x_begin)
  cv::Rect bbox;
  std::int64_t area = 0;

  /// Binary mask of the component, `bbox`-sized.
  cv::Mat mask() const;
  /// Pixel centres in raster order.
  std::vector<cv::Point> pixels() const;
};

/// Maximal 8-connected components of the nonzero pixels of a CV_8UC1 mask,
/// ordered by their first pixel in raster order.
std::vector<ConnectedComponent> connected_components(const cv::Mat& mask, std::uint8_t class_index = 255);
std::vector<ConnectedComponent> connected_components(const LabelMap& map, std::uint8_t class_index);

/// CV_32SC1 image with 1-based component ids, 0 elsewhere.
cv::Mat component_id_image(std::span<const ConnectedComponent> components, cv::Size size);

/// Class index → minimum area as a fraction of the page area.
using AreaThresholds = std::map<std::uint8_t, double>;

/// Keeps components with area >= ratio * page_area. Classes missing from
/// `thresholds` pass unfiltered.
std::vector<ConnectedComponent> filter_components(std::span<const ConnectedComponent> components,
                                                  const AreaThresholds& thresholds, std::int64_t page_area);

struct Baseline {
  /// Polynomial y(t) in the aligned frame, lowest degree first, where
  /// t = (u - u_center) / u_scale.
  std::vector<double> coefficients;
  double theta = 0.0;  // radians, orientation of the frame's u axis
  cv::Point2d origin;  // page-space origin of the frame
  double u_min = 0.0;
  double u_max = 0.0;
  double u_center = 0.0;
  double u_scale = 1.0;
  std::vector<cv::Point2d> polyline;  // page space, 1-px steps in u

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
  double evaluate(double u) const;
  cv::Point2d to_page(double u, double v) const;
  /// Page point → (u, v) in the aligned frame.
  cv::Point2d to_frame(cv::Point2d p) const;
};

struct BaselineConfig {
  int min_width = 10;
  int max_degree = 5;
};

/// Baseline of a text component: TLS line for the orientation, bottom pixel
/// per 1-px column of the aligned frame, least-squares polynomial on those
/// samples (end columns much shorter than the median are skipped).
/// Components narrower than `min_width` along the line yield
/// nullopt. Assumes upright text.
std::optional<Baseline> extract_baseline(const ConnectedComponent& component, const BaselineConfig& cfg = {});

/// TLS orientation of a point set in radians, folded to (-pi/2, pi/2].
double principal_orientation(std::span<const cv::Point> pixels, cv::Point2d* mean = nullptr);

struct IllustrationRegion {
  ConnectedComponent component;
  cv::Rect bbox;
  std::vector<cv::Point> contour;  // outer boundary through pixel centres
};

/// Raster mask of `contour` including its boundary pixels.
cv::Mat contour_mask(std::span<const cv::Point> contour, cv::Size size);

std::vector<IllustrationRegion> extract_illustrations(const LabelMap& map, std::uint8_t illustration_index,
                                                      double area_ratio);

struct PostprocConfig {
  double text_ratio = 5e-5;
  double illustration_ratio = 5e-4;
  BaselineConfig baseline;
};

struct ComponentStats {
  int found = 0;
  int kept = 0;
};

struct PageAnalysis {
  std::vector<Baseline> baselines;
  std::vector<IllustrationRegion> illustrations;
  ComponentStats text;
  ComponentStats illustration;
  int too_narrow = 0;
};

/// Full post-processing of one map; fine maps are collapsed to coarse first.
PageAnalysis analyze_page(const LabelMap& map, const PostprocConfig& cfg = {});

}  // namespace docsynth
