#pragma once

#include <opencv2/core.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "docsynth/assets.hpp"
#include "docsynth/geometry.hpp"
#include "docsynth/layout.hpp"
#include "docsynth/rng.hpp"
#include "docsynth/taxonomy.hpp"

namespace docsynth {

/// Geometry of one typeset line.
///
/// Rows and columns are in the element's *typesetting frame* (the unrotated
/// canvas the text was drawn on). `to_element` maps that frame to element
/// space, or to page space for lines returned by page_lines().
struct LineMetrics {
  int baseline_y = 0;
  int xheight_top_y = 0;
  int x_left = 0;   // first ink column
  int x_right = 0;  // last ink column
  cv::Rect line_bbox;  // ink plus ascent/descent box
  double rotation_deg = 0.0;
  Affine to_element = Affine(1, 0, 0, 0, 1, 0);

  int x_height() const { return baseline_y - xheight_top_y; }
};

/// Pixel-centre polygon of rows [top, bottom] x cols [left, right] of the
/// typesetting frame, grown by `grow` pixels on every side, mapped by the
/// line transform.
std::vector<cv::Point2d> line_rect_polygon(const LineMetrics& line, double top, double bottom, double left,
                                           double right, double grow = 0.0);
/// The x-height band polygon.
std::vector<cv::Point2d> xheight_polygon(const LineMetrics& line, double grow = 0.0);
/// The line bbox polygon.
std::vector<cv::Point2d> bbox_polygon(const LineMetrics& line);
/// Baseline endpoints through pixel centres of the first and last ink column.
std::vector<cv::Point2d> baseline_segment(const LineMetrics& line);

struct RenderedElement {
  cv::Mat raster;    // CV_8UC4 BGRA, sized to the content rect
  cv::Mat ink_mask;  // CV_8UC1, 255 where ink was drawn
  ElementClass element_class = ElementClass::kParagraph;
  std::vector<LineMetrics> lines;  // text classes only
  cv::Point placement;             // top-left of raster in page space
  double rotation_deg = 0.0;

  cv::Rect page_rect() const { return {placement, raster.size()}; }
};

enum class Alignment : std::uint8_t { kLeft, kCenter, kRight, kJustify };

/// Parameters of one typesetting run.
struct TextStyle {
  const FontFace* font = nullptr;
  int size_px = 24;
  double line_spacing = 1.2;  // baseline pitch / size_px
  double word_spacing = 1.0;  // multiple of the face's space advance
  Alignment alignment = Alignment::kLeft;
  bool strikethrough = false;
  bool underline = false;
  bool bounding_box = false;
  double rotation_deg = 0.0;
  cv::Scalar ink = cv::Scalar(20, 20, 20);  // BGR
  bool right_to_left = false;
  /// Words are joined without spaces (Chinese).
  bool no_spaces = false;
};

struct TextStyleConfig {
  ScriptWeights script_weights = {0.8, 0.1, 0.1};
  double p_rotate = 0.25;
  double max_rotation_deg = 5.0;
  double p_strikethrough = 0.05;
  double p_underline = 0.05;
  double p_bounding_box = 0.1;
  double p_justify = 0.4;
  double p_center = 0.15;
  double p_right = 0.05;
  cv::Vec2d paragraph_px{14, 34};
  cv::Vec2d title_px{30, 70};
  cv::Vec2d caption_px{11, 20};
  cv::Vec2d floating_word_px{14, 44};
  cv::Vec2d table_px{11, 22};
  cv::Vec2d line_spacing{1.05, 1.6};
  cv::Vec2d word_spacing{0.8, 1.6};
  int min_font_px = 8;
  cv::Vec2i table_cols{2, 4};
  cv::Vec2i table_rows{2, 6};
};

struct DrawingConfig {
  int blur_kernel = 21;     // odd; sigma follows OpenCV's kernel-size rule
  int ink_threshold = 220;  // output below this is ink
};

struct ElementAugmentConfig {
  double p_blur = 0.1;
  cv::Vec2d blur_sigma{0.3, 1.2};
  double p_recolor = 0.15;
  double p_opacity = 0.3;
  cv::Vec2d opacity{0.6, 1.0};
};

struct ElementConfig {
  TextStyleConfig text;
  DrawingConfig drawing;
  ElementAugmentConfig augment;
};

/// Typesets pre-split lines of words into a canvas of `content` size.
/// Lines that do not fit vertically are dropped; words wider than a line are
/// truncated. The first baseline sits `ascent` below the top of the text
/// area, unless `first_baseline` pins it.
RenderedElement typeset_lines(ElementClass cls, const std::vector<std::vector<std::string>>& lines,
                              const TextStyle& style, cv::Size content,
                              std::optional<int> first_baseline = std::nullopt);

/// Greedy word wrap at `max_width` pixels.
std::vector<std::vector<std::string>> wrap_words(const std::vector<std::string>& words, const TextStyle& style,
                                                 int max_width);

/// Splits a snippet into layout tokens (words, or code points for Chinese).
std::vector<std::string> tokenize(const TextSnippet& snippet);

/// Largest rect of `outer`'s aspect-free size that still fits inside `outer`
/// once rotated by `degrees` about its centre.
cv::Size rotation_safe_size(cv::Size outer, double degrees);

RenderedElement render_text(const ElementSpec& spec, const AssetStore& store, Rng& rng, const ElementConfig& cfg);

/// Aspect-preserving fit of `source` into `content`, centred, transparent
/// letterbox bands.
RenderedElement letterbox_image(const cv::Mat& source, cv::Size content);
RenderedElement render_image(const ElementSpec& spec, const AssetStore& store, Rng& rng);

/// Colour-dodge of the grayscale source with its blurred negative; returns
/// the 8-bit pencil rendering (before alpha). Exposed for tests.
cv::Mat dodge_sketch(const cv::Mat& source_bgr, int blur_kernel);
RenderedElement drawing_from_source(const cv::Mat& source, cv::Size content, const DrawingConfig& cfg);
RenderedElement render_drawing(const ElementSpec& spec, const AssetStore& store, Rng& rng, const DrawingConfig& cfg);

/// One uppercase letter scaled to fill `content`. Empty ink → GlyphMissing.
RenderedElement glyph_element(const FontFace& font, char letter, cv::Size content);
RenderedElement render_glyph(const ElementSpec& spec, const AssetStore& store, Rng& rng);

/// Dispatches on spec.element_class and places the result at the content rect.
RenderedElement render_element(const ElementSpec& spec, const AssetStore& store, Rng& rng, const ElementConfig& cfg);

struct ElementAugmentation {
  std::optional<double> blur_sigma;
  std::optional<cv::Scalar> color;  // BGR
  double opacity = 1.0;
};

ElementAugmentation sample_element_augmentation(Rng& rng, const ElementAugmentConfig& cfg);
/// Blur, recolour (never on images) and opacity on the raster; mask and
/// lines are untouched.
RenderedElement apply_element_augmentations(RenderedElement element, const ElementAugmentation& aug);
RenderedElement apply_element_augmentations(RenderedElement element, Rng& rng, const ElementAugmentConfig& cfg);

/// Alpha-composites `elements` in order onto a copy of `background` (BGR).
/// Elements that stick out of the page are clipped.
cv::Mat compose_page(const cv::Mat& background, std::span<const RenderedElement> elements);

/// The element's lines with `to_element` extended by its placement, i.e.
/// mapping the typesetting frame straight to page space.
std::vector<LineMetrics> page_lines(const RenderedElement& element);

/// Composites one BGRA raster at `offset` into `canvas` (BGR), in place,
/// scaling alpha by `opacity`.
void blend_onto(cv::Mat& canvas, const cv::Mat& bgra, cv::Point offset, double opacity = 1.0);

}  // namespace docsynth
