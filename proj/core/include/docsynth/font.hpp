#pragma once

#include <opencv2/core.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace docsynth {

/// Vertical metrics expressed as fractions of the em size, so a face
/// rendered at `px` pixels per em has an x-height of `x_height * px`.
struct FontMetrics {
  int units_per_em = 0;
  double ascent = 0.0;
  double descent = 0.0;  // positive, below the baseline
  double x_height = 0.0;
  /// True when the face carries no usable OS/2 sxHeight and the value was
  /// measured from the rendered ink of 'x'.
  bool x_height_measured = false;
};

struct FontFace {
  std::filesystem::path path;
  std::string name;
  FontMetrics metrics;
};

/// Reads units-per-em, ascender/descender and sxHeight from the sfnt tables
/// of a TrueType/OpenType file (first face of a collection). The x-height is
/// left at 0 when the OS/2 table does not provide one.
/// Throws Error(kFontParseError) for unreadable or malformed files.
FontMetrics read_sfnt_metrics(const std::filesystem::path& path);

/// Loads a face: parses sfnt metrics, checks FreeType can open it and fills
/// a missing x-height by measuring 'x' at a reference size.
FontFace load_font_face(const std::filesystem::path& path);

/// Rasterizes text with one face. Not thread-safe; use `renderer_for`, which
/// hands out one instance per (thread, face).
class FontRenderer {
 public:
  explicit FontRenderer(const std::filesystem::path& path);
  ~FontRenderer();
  FontRenderer(const FontRenderer&) = delete;
  FontRenderer& operator=(const FontRenderer&) = delete;

  /// Advance width of `text` in pixels at `px` pixels per em.
  int text_width(std::string_view text, int px) const;

  /// Draws `text` into an 8-bit single-channel coverage raster. The bottom
  /// ink row of flat-bottomed glyphs such as 'x' lands on `baseline_y`.
  void draw(cv::Mat& coverage, std::string_view text, int pen_x, int baseline_y, int px) const;

  /// Distance in rows from the top ink row of a rendered 'x' down to the
  /// baseline row at `px`; 0 when the face has no usable ink for it.
  int measured_x_height(int px) const;

  /// Ink bounding box of `text` relative to (pen_x = 0, baseline = 0).
  cv::Rect ink_box(std::string_view text, int px) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Per-thread renderer cache keyed by face path.
FontRenderer& renderer_for(const FontFace& face);

/// x-height in pixels of `face` at `px` pixels per em, preferring the measured
/// ink of 'x' at that exact size and falling back to the metric.
int x_height_px(const FontFace& face, int px);

}  // namespace docsynth
