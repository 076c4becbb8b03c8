#pragma once

#include <opencv2/core.hpp>

#include <array>
#include <cstdint>
#include <vector>

#include "docsynth/rng.hpp"
#include "docsynth/taxonomy.hpp"

namespace docsynth {

/// Class draw weights indexed by `static_cast<int>(ElementClass) - 1`.
using ClassWeights = std::array<double, 8>;

inline constexpr ClassWeights kDefaultClassWeights = {0.34, 0.09, 0.08, 0.07, 0.06, 0.15, 0.11, 0.10};

struct LayoutConfig {
  int min_rows = 1;
  int max_rows = 4;
  int min_cols = 1;
  int max_cols = 3;
  /// Interior cell boundaries move by up to this fraction of a cell.
  double jitter = 0.15;
  /// Usable area is the page region inset by this fraction on each side.
  double page_margin = 0.03;
  double p_empty = 0.1;
  /// Per orientation, for image/drawing/glyph cells.
  double p_caption = 0.3;
  double margin_min = 0.02;
  double margin_max = 0.15;
  /// Smallest content rect side kept after margins and caption carving.
  int min_content = 24;
  ClassWeights class_weights = kDefaultClassWeights;

  void validate() const;
};

struct GridLayout {
  cv::Size page_size;
  cv::Rect usable;
  int rows = 0;
  int cols = 0;
  std::vector<cv::Rect> cells;  // row-major
};

struct Margins {
  int top = 0, bottom = 0, left = 0, right = 0;
};

enum class Orientation : std::uint8_t { kHorizontal, kVertical };

struct ElementSpec {
  ElementClass element_class = ElementClass::kParagraph;
  cv::Rect cell;
  Margins margins;
  /// Cell minus margins, minus any carved caption strips.
  cv::Rect content;
  /// Vertical captions are typeset rotated by 90 degrees.
  Orientation orientation = Orientation::kHorizontal;
  /// Seeds every render-time parameter of this element.
  std::uint64_t seed = 0;
  /// Only for image, drawing and glyph specs.
  std::vector<ElementSpec> captions;

  bool valid(int min_content = 1) const;
};

/// Usable area of a page region after the configured page margin.
cv::Rect usable_area(const cv::Rect& page_region, double page_margin);

/// Draws a rows x cols grid tiling `usable` exactly. Throws InvalidBounds.
GridLayout sample_layout(cv::Size page_size, const cv::Rect& usable, Rng& rng, const LayoutConfig& cfg);

/// One spec per non-empty cell, in cell order.
std::vector<ElementSpec> fill_layout(const GridLayout& layout, Rng& rng, const LayoutConfig& cfg);

/// Specs with captions flattened after their parent, in render order.
std::vector<ElementSpec> flatten(const std::vector<ElementSpec>& specs);

}  // namespace docsynth
