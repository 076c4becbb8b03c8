#pragma once

#include <opencv2/core.hpp>

#include <optional>

#include "docsynth/rng.hpp"

namespace docsynth {

struct DegradeConfig {
  double p_blur = 0.5;
  cv::Vec2d blur_sigma{0.3, 2.0};
  double p_noise = 0.5;
  cv::Vec2i noise_shape_count{0, 8};
  double p_bleed = 0.4;
  cv::Vec2d bleed_opacity{0.1, 0.35};
  /// Mirror the verso horizontally before compositing, as show-through is.
  bool mirror_verso = true;

  void validate() const;
};

/// Concrete degradations for one page, drawn up front so the raster pipeline
/// is a pure function of the plan.
struct DegradePlan {
  std::optional<double> bleed_opacity;
  int noise_shapes = 0;
  std::uint64_t noise_seed = 0;
  std::uint64_t verso_seed = 0;
  std::optional<double> blur_sigma;
};

DegradePlan sample_degrade_plan(Rng& rng, const DegradeConfig& cfg);

/// Gaussian filter of the page; sigma must be positive.
cv::Mat apply_blur(const cv::Mat& page, double sigma);

/// Draws `shape_count` low-contrast distractor shapes (lines, arcs, blobs,
/// stains). Nothing drawn here is ever labelled.
cv::Mat apply_structured_noise(const cv::Mat& page, Rng& rng, int shape_count);

/// Composites a BGRA verso at `opacity`, mirrored when requested.
cv::Mat apply_bleedthrough(const cv::Mat& page, const cv::Mat& verso_bgra, double opacity, bool mirror = true);

}  // namespace docsynth
