#pragma once

#include <opencv2/core.hpp>

#include <optional>
#include <span>
#include <vector>

#include "docsynth/elements.hpp"
#include "docsynth/taxonomy.hpp"

namespace docsynth {

enum class TextRepresentation : std::uint8_t { kXHeight, kBaseline };

std::string_view to_string(TextRepresentation r);

struct TextLabelMode {
  TextRepresentation representation = TextRepresentation::kXHeight;
  bool with_border = true;
};

struct LabelConfig {
  /// Border ring thickness as a fraction of the x-height band height.
  double border_fraction = 0.15;
  int border_min_px = 2;
  /// Stroke thickness of baseline-mode text labels.
  int baseline_thickness = 3;
  /// Closing radius as a fraction of min(element width, height).
  double closing_fraction = 0.015;
  int closing_min_px = 2;
  bool border_on_illustrations = false;
};

struct LabelMap {
  cv::Mat data;  // CV_8UC1 class indices
  TaxonomyKind taxonomy = TaxonomyKind::kCoarse;

  int width() const { return data.cols; }
  int height() const { return data.rows; }
};

struct TextMasks {
  cv::Mat text;    // CV_8UC1, 255 = text
  cv::Mat border;  // CV_8UC1, 255 = border; never overlaps `text`
};

/// Border thickness used for a line under `cfg`.
int border_thickness_for(const LineMetrics& line, const LabelConfig& cfg);

/// Text region polygon of a page-space line under the representation.
std::vector<cv::Point2d> text_region_polygon(const LineMetrics& line, TextRepresentation rep, int baseline_thickness,
                                             double grow = 0.0);

/// Rasterizes page-space lines into text and border masks. A set
/// `border_thickness` overrides the per-line default.
TextMasks label_text_lines(std::span<const LineMetrics> lines, cv::Size page, const TextLabelMode& mode,
                           const LabelConfig& cfg, std::optional<int> border_thickness = std::nullopt);

/// Morphological closing with a disk of `radius`. Pixels outside the mask
/// are treated as background, so shapes never bleed into the frame edge.
cv::Mat label_shape(const cv::Mat& ink_mask, int radius);

int closing_radius_for(cv::Size element, const LabelConfig& cfg);

/// Rasterizes placed elements into one map. Precedence, highest first:
/// text > border > illustration > background.
LabelMap build_label_map(std::span<const RenderedElement> placements, cv::Size page, TaxonomyKind taxonomy,
                         const TextLabelMode& mode, const LabelConfig& cfg);

/// Applies the fine→coarse mapping pixelwise.
LabelMap collapse_to_coarse(const LabelMap& fine);

using Polyline = std::vector<cv::Point2d>;

/// One page-space polyline per line, sampled every pixel of arc length.
std::vector<Polyline> ground_truth_baselines(std::span<const RenderedElement> placements);

}  // namespace docsynth
