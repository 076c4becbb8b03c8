#include "docsynth/labels.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <opencv2/imgproc.hpp>

#include "docsynth/geometry.hpp"

namespace docsynth {

std::string_view to_string(TextRepresentation r) {
  return r == TextRepresentation::kXHeight ? "xheight" : "baseline";
}

int border_thickness_for(const LineMetrics& line, const LabelConfig& cfg) {
  const double band = line.x_height() + 1;
  return std::max(cfg.border_min_px, static_cast<int>(std::lround(cfg.border_fraction * band)));
}

std::vector<cv::Point2d> text_region_polygon(const LineMetrics& line, TextRepresentation rep, int baseline_thickness,
                                             double grow) {
  if (rep == TextRepresentation::kXHeight) return xheight_polygon(line, grow);
  const int above = (baseline_thickness - 1) / 2;
  const int below = baseline_thickness - 1 - above;
  return line_rect_polygon(line, line.baseline_y - above, line.baseline_y + below, line.x_left, line.x_right, grow);
}

TextMasks label_text_lines(std::span<const LineMetrics> lines, cv::Size page, const TextLabelMode& mode,
                           const LabelConfig& cfg, std::optional<int> border_thickness) {
  TextMasks masks{cv::Mat::zeros(page, CV_8UC1), cv::Mat::zeros(page, CV_8UC1)};
  for (const LineMetrics& line : lines) {
    if (line.x_right < line.x_left || line.x_height() <= 0) {
      spdlog::debug("DegenerateLine skipped (cols {}..{}, x-height {})", line.x_left, line.x_right, line.x_height());
      continue;
    }
    fill_polygon(masks.text, text_region_polygon(line, mode.representation, cfg.baseline_thickness), 255);
    if (mode.with_border) {
      const int t = border_thickness.value_or(border_thickness_for(line, cfg));
      fill_polygon(masks.border, text_region_polygon(line, mode.representation, cfg.baseline_thickness, t), 255);
    }
  }
  masks.border.setTo(0, masks.text);
  return masks;
}

int closing_radius_for(cv::Size element, const LabelConfig& cfg) {
  return std::max(cfg.closing_min_px,
                  static_cast<int>(std::lround(cfg.closing_fraction * std::min(element.width, element.height))));
}

cv::Mat label_shape(const cv::Mat& ink_mask, int radius) {
  CV_Assert(ink_mask.type() == CV_8UC1);
  if (radius <= 0 || cv::countNonZero(ink_mask) == 0) return ink_mask.clone();
  const cv::Mat disk = cv::getStructuringElement(cv::MORPH_ELLIPSE, {2 * radius + 1, 2 * radius + 1});
  // Pad so dilation has room and erosion sees true background at the frame.
  const int pad = radius + 1;
  cv::Mat padded;
  cv::copyMakeBorder(ink_mask, padded, pad, pad, pad, pad, cv::BORDER_CONSTANT, cv::Scalar(0));
  cv::threshold(padded, padded, 0, 255, cv::THRESH_BINARY);
  cv::Mat dilated, closed;
  cv::dilate(padded, dilated, disk, {-1, -1}, 1, cv::BORDER_CONSTANT, cv::Scalar(0));
  cv::erode(dilated, closed, disk, {-1, -1}, 1, cv::BORDER_CONSTANT, cv::Scalar(0));
  return closed(cv::Rect(pad, pad, ink_mask.cols, ink_mask.rows)).clone();
}

namespace {

// Element mask placed on a page-size canvas (clipped).
void paint(cv::Mat& canvas, const cv::Mat& mask, cv::Point offset, std::uint8_t value) {
  const cv::Rect page(0, 0, canvas.cols, canvas.rows);
  const cv::Rect target = cv::Rect(offset, mask.size()) & page;
  if (target.area() == 0) return;
  const cv::Rect src(target.tl() - offset, target.size());
  canvas(target).setTo(value, mask(src));
}

cv::Mat illustration_shape(const RenderedElement& e, const LabelConfig& cfg) {
  if (e.element_class == ElementClass::kImage) return e.ink_mask;
  return label_shape(e.ink_mask, closing_radius_for(e.raster.size(), cfg));
}

}  // namespace

LabelMap build_label_map(std::span<const RenderedElement> placements, cv::Size page, TaxonomyKind taxonomy,
                         const TextLabelMode& mode, const LabelConfig& cfg) {
  const LabelTaxonomy& tax = LabelTaxonomy::get(taxonomy);
  LabelMap map{cv::Mat::zeros(page, CV_8UC1), taxonomy};
  cv::Mat border_all = cv::Mat::zeros(page, CV_8UC1);

  for (const auto& e : placements) {
    if (is_text_class(e.element_class)) continue;
    const cv::Mat shape = illustration_shape(e, cfg);
    paint(map.data, shape, e.placement, tax.index_of(e.element_class));
    if (cfg.border_on_illustrations && mode.with_border) {
      const int t = std::max(cfg.border_min_px, closing_radius_for(e.raster.size(), cfg));
      cv::Mat padded, grown;
      cv::copyMakeBorder(shape, padded, t, t, t, t, cv::BORDER_CONSTANT, cv::Scalar(0));
      cv::dilate(padded, grown, cv::getStructuringElement(cv::MORPH_RECT, {2 * t + 1, 2 * t + 1}));
      grown.setTo(0, [&] {
        cv::Mat inner;
        cv::copyMakeBorder(shape, inner, t, t, t, t, cv::BORDER_CONSTANT, cv::Scalar(0));
        return inner;
      }());
      paint(border_all, grown, e.placement - cv::Point(t, t), 255);
    }
  }

  std::vector<std::pair<std::uint8_t, cv::Mat>> texts;
  for (const auto& e : placements) {
    if (!is_text_class(e.element_class) || e.lines.empty()) continue;
    const auto lines = page_lines(e);
    TextMasks m = label_text_lines(lines, page, mode, cfg);
    cv::bitwise_or(border_all, m.border, border_all);
    texts.emplace_back(tax.index_of(e.element_class), std::move(m.text));
  }
  map.data.setTo(tax.border_index(), border_all);
  for (const auto& [index, mask] : texts) map.data.setTo(index, mask);
  return map;
}

LabelMap collapse_to_coarse(const LabelMap& fine) {
  if (fine.taxonomy == TaxonomyKind::kCoarse) return fine;
  cv::Mat lut(1, 256, CV_8UC1);
  for (int i = 0; i < 256; ++i) lut.at<std::uint8_t>(i) = LabelTaxonomy::fine_to_coarse(static_cast<std::uint8_t>(i));
  LabelMap out{cv::Mat(), TaxonomyKind::kCoarse};
  cv::LUT(fine.data, lut, out.data);
  return out;
}

std::vector<Polyline> ground_truth_baselines(std::span<const RenderedElement> placements) {
  std::vector<Polyline> out;
  for (const auto& e : placements) {
    for (const auto& line : page_lines(e)) {
      const auto seg = baseline_segment(line);
      out.push_back(resample_polyline(seg, 1.0));
    }
  }
  return out;
}

}  // namespace docsynth
