#include "docsynth/elements.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <opencv2/imgproc.hpp>

#include "docsynth/error.hpp"
#include "docsynth/font.hpp"
#include "docsynth/image_io.hpp"

namespace docsynth {

namespace {

// Byte length of the UTF-8 sequence starting with `lead`.
std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

std::vector<std::string> code_points(std::string_view s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    const std::size_t n = std::min(utf8_length(static_cast<unsigned char>(s[i])), s.size() - i);
    out.emplace_back(s.substr(i, n));
    i += n;
  }
  return out;
}

int space_px(const TextStyle& style) {
  if (style.no_spaces) return 0;
  return std::max(1, static_cast<int>(std::lround(0.28 * style.size_px * style.word_spacing)));
}

int ascent_px(const TextStyle& style) {
  return static_cast<int>(std::ceil(style.font->metrics.ascent * style.size_px));
}

int descent_px(const TextStyle& style) {
  return static_cast<int>(std::ceil(style.font->metrics.descent * style.size_px));
}

int pitch_px(const TextStyle& style) {
  return std::max(1, static_cast<int>(std::lround(style.line_spacing * style.size_px)));
}

// Drops trailing code points until `word` fits in `max_width`; empty if even
// one code point does not.
std::string truncate_to_width(const std::string& word, const TextStyle& style, int max_width) {
  const FontRenderer& r = renderer_for(*style.font);
  auto cps = code_points(word);
  while (!cps.empty()) {
    std::string s;
    for (const auto& cp : cps) s += cp;
    if (r.text_width(s, style.size_px) <= max_width) return s;
    cps.pop_back();
  }
  return {};
}

// Draws one line of words with its baseline on canvas row `baseline`, inside
// columns [area_x, area_x + area_w). Returns no metrics when nothing inked.
std::optional<LineMetrics> draw_line(cv::Mat& coverage, const std::vector<std::string>& words, const TextStyle& style,
                                     int area_x, int area_w, int baseline, bool last_line) {
  if (words.empty()) return std::nullopt;
  const FontRenderer& r = renderer_for(*style.font);
  const int px = style.size_px;
  const int asc = ascent_px(style);
  const int desc = descent_px(style);
  const int space = space_px(style);

  std::vector<int> widths;
  int total = 0;
  for (const auto& w : words) {
    widths.push_back(r.text_width(w, px));
    total += widths.back();
  }
  const int gaps = static_cast<int>(words.size()) - 1;
  total += gaps * space;

  Alignment align = style.alignment;
  if (align == Alignment::kJustify && (last_line || gaps == 0)) {
    align = style.right_to_left ? Alignment::kRight : Alignment::kLeft;
  }
  if (style.right_to_left && align == Alignment::kLeft) align = Alignment::kRight;

  double gap = space;
  double x = area_x;
  switch (align) {
    case Alignment::kLeft: break;
    case Alignment::kCenter: x = area_x + (area_w - total) / 2.0; break;
    case Alignment::kRight: x = area_x + area_w - total; break;
    case Alignment::kJustify: gap = space + static_cast<double>(area_w - total) / gaps; break;
  }
  x = std::max<double>(x, area_x);

  const int strip_top = std::max(0, baseline - asc - 2);
  const int strip_bottom = std::min(coverage.rows - 1, baseline + desc + 2);
  if (strip_bottom < strip_top) return std::nullopt;
  cv::Mat strip = cv::Mat::zeros(strip_bottom - strip_top + 1, coverage.cols, CV_8UC1);

  // Right-to-left scripts read from the right edge: place the first word last.
  std::vector<std::size_t> order(words.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = style.right_to_left ? order.size() - 1 - i : i;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    r.draw(strip, words[i], static_cast<int>(std::lround(x)), baseline - strip_top, px);
    x += widths[i] + gap;
  }

  cv::Mat cols;
  cv::reduce(strip, cols, 0, cv::REDUCE_MAX);
  int left = -1, right = -1;
  for (int c = 0; c < cols.cols; ++c) {
    if (cols.at<std::uint8_t>(0, c) > 0) {
      if (left < 0) left = c;
      right = c;
    }
  }
  if (left < 0) return std::nullopt;

  LineMetrics line;
  line.baseline_y = baseline;
  line.xheight_top_y = baseline - x_height_px(*style.font, px);
  line.x_left = left;
  line.x_right = right;

  const int stroke = std::max(1, static_cast<int>(std::lround(px / 14.0)));
  if (style.strikethrough) {
    const int mid = (line.xheight_top_y + baseline) / 2 - strip_top;
    cv::rectangle(strip, cv::Point(left, mid - stroke / 2), cv::Point(right, mid - stroke / 2 + stroke - 1),
                  cv::Scalar(255), cv::FILLED);
  }
  if (style.underline) {
    const int row = std::min(baseline + std::max(2, desc / 2), strip_bottom - stroke + 1) - strip_top;
    cv::rectangle(strip, cv::Point(left, row), cv::Point(right, row + stroke - 1), cv::Scalar(255), cv::FILLED);
  }

  const cv::Rect ink = cv::boundingRect(strip) + cv::Point(0, strip_top);
  const cv::Rect metric_box(left, baseline - asc, right - left + 1, asc + desc + 1);
  line.line_bbox = (ink | metric_box) & cv::Rect(0, 0, coverage.cols, coverage.rows);

  cv::Mat roi = coverage.rowRange(strip_top, strip_bottom + 1);
  cv::max(roi, strip, roi);
  return line;
}

struct Typeset {
  cv::Mat coverage;
  std::vector<LineMetrics> lines;
};

RenderedElement make_element(ElementClass cls, const cv::Mat& coverage, const cv::Scalar& ink,
                             std::vector<LineMetrics> lines, double rotation) {
  RenderedElement e;
  e.element_class = cls;
  std::vector<cv::Mat> channels = {cv::Mat(coverage.size(), CV_8UC1, cv::Scalar(ink[0])),
                                   cv::Mat(coverage.size(), CV_8UC1, cv::Scalar(ink[1])),
                                   cv::Mat(coverage.size(), CV_8UC1, cv::Scalar(ink[2])), coverage};
  cv::merge(channels, e.raster);
  cv::compare(coverage, 0, e.ink_mask, cv::CMP_GT);
  e.lines = std::move(lines);
  e.rotation_deg = rotation;
  return e;
}

// Rotates coverage about the canvas centre and records the transform.
void rotate_typeset(Typeset& t, double degrees) {
  if (degrees == 0.0) return;
  const cv::Point2d center((t.coverage.cols - 1) / 2.0, (t.coverage.rows - 1) / 2.0);
  const Affine m = rotation_about(center, degrees);
  cv::Mat rotated;
  cv::warpAffine(t.coverage, rotated, cv::Mat(m), t.coverage.size(), cv::INTER_LINEAR, cv::BORDER_CONSTANT,
                 cv::Scalar(0));
  t.coverage = rotated;
  for (auto& l : t.lines) {
    l.to_element = compose(m, l.to_element);
    l.rotation_deg += degrees;
  }
}

Typeset typeset_area(const std::vector<std::vector<std::string>>& lines, const TextStyle& style, cv::Size canvas,
                     const cv::Rect& area, std::optional<int> first_baseline) {
  Typeset t;
  t.coverage = cv::Mat::zeros(canvas, CV_8UC1);
  const int asc = ascent_px(style);
  const int desc = descent_px(style);
  const int pitch = pitch_px(style);
  int baseline = first_baseline.value_or(area.y + asc);
  for (std::size_t i = 0; i < lines.size(); ++i, baseline += pitch) {
    if (baseline + desc >= area.br().y) break;
    std::vector<std::string> words;
    int used = 0;
    const int space = space_px(style);
    for (const auto& w : lines[i]) {
      const int room = area.width - used - (words.empty() ? 0 : space);
      const std::string fitted = truncate_to_width(w, style, room);
      if (fitted.empty()) break;
      used += (words.empty() ? 0 : space) + renderer_for(*style.font).text_width(fitted, style.size_px);
      words.push_back(fitted);
      if (fitted.size() != w.size()) break;
    }
    auto line = draw_line(t.coverage, words, style, area.x, area.width, baseline, i + 1 == lines.size());
    if (line) t.lines.push_back(*line);
  }
  if (style.bounding_box && !t.lines.empty()) {
    cv::Rect box = t.lines.front().line_bbox;
    for (const auto& l : t.lines) box |= l.line_bbox;
    const int pad = std::max(2, style.size_px / 4);
    box = cv::Rect(box.x - pad, box.y - pad, box.width + 2 * pad, box.height + 2 * pad) & area;
    const int thick = std::max(1, style.size_px / 16);
    cv::rectangle(t.coverage, box, cv::Scalar(255), thick);
  }
  return t;
}

cv::Rect centered_area(cv::Size canvas, cv::Size inner) {
  return {(canvas.width - inner.width) / 2, (canvas.height - inner.height) / 2, inner.width, inner.height};
}

int line_capacity(const TextStyle& style, int height) {
  const int asc = ascent_px(style);
  const int desc = descent_px(style);
  if (height <= asc + desc) return 0;
  return 1 + (height - asc - desc - 1) / pitch_px(style);
}

cv::Scalar sample_ink(Rng& rng, ElementClass cls) {
  const double u = rng.uniform();
  if (cls == ElementClass::kTitle && u < 0.25) {
    return cv::Scalar(rng.uniform(0, 40), rng.uniform(0, 40), rng.uniform(140, 200));
  }
  if (u < 0.2) return cv::Scalar(rng.uniform(20, 40), rng.uniform(40, 70), rng.uniform(70, 110));
  const double g = rng.uniform(0, 50);
  return cv::Scalar(g, g, g);
}

cv::Vec2d size_range(const TextStyleConfig& cfg, ElementClass cls) {
  switch (cls) {
    case ElementClass::kTitle: return cfg.title_px;
    case ElementClass::kCaption: return cfg.caption_px;
    case ElementClass::kFloatingWord: return cfg.floating_word_px;
    case ElementClass::kTable: return cfg.table_px;
    default: return cfg.paragraph_px;
  }
}

RenderedElement typeset_table(const AssetStore& store, Rng& rng, const ElementConfig& cfg,
                              TextStyle style, cv::Size canvas) {
  const cv::Rect area = centered_area(canvas, rotation_safe_size(canvas, style.rotation_deg));
  const int cols = rng.uniform_int(cfg.text.table_cols[0], cfg.text.table_cols[1]);
  int rows = rng.uniform_int(cfg.text.table_rows[0], cfg.text.table_rows[1]);
  const double em_lines = style.font->metrics.ascent + style.font->metrics.descent;
  const int max_rows = static_cast<int>(area.height / (em_lines * cfg.text.min_font_px + 4));
  rows = std::min(rows, max_rows);
  if (rows < 1 || area.width / cols < 12) throw Error(ErrorCode::kTextDoesNotFit, "table cell too small");
  const int cell_h = area.height / rows;
  const int cell_w = area.width / cols;
  style.size_px = std::min(style.size_px, static_cast<int>((cell_h - 4) / em_lines));
  style.size_px = std::max(style.size_px, cfg.text.min_font_px);
  style.alignment = Alignment::kLeft;
  style.bounding_box = false;
  style.strikethrough = false;
  style.underline = false;

  const TextSnippet& snippet = sample_text(store, rng, cfg.text.script_weights);
  style.right_to_left = snippet.script == Script::kArabic;
  style.no_spaces = snippet.script == Script::kChinese;
  const auto tokens = tokenize(snippet);

  Typeset t;
  t.coverage = cv::Mat::zeros(canvas, CV_8UC1);
  std::size_t next = tokens.empty() ? 0 : rng.index(tokens.size());
  const int asc = ascent_px(style);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (rng.bernoulli(0.1)) continue;
      std::string word;
      if (tokens.empty() || rng.bernoulli(0.3)) {
        word = std::to_string(rng.uniform_int(1, 9999));
      } else {
        word = tokens[next++ % tokens.size()];
        if (style.no_spaces && rng.bernoulli(0.7)) word += tokens[next++ % tokens.size()];
      }
      const int x0 = area.x + c * cell_w + 3;
      const int baseline = area.y + r * cell_h + 2 + asc;
      const std::string fitted = truncate_to_width(word, style, cell_w - 6);
      if (fitted.empty()) continue;
      auto line = draw_line(t.coverage, {fitted}, style, x0, cell_w - 6, baseline, true);
      if (line) t.lines.push_back(*line);
    }
  }
  if (t.lines.empty()) throw Error(ErrorCode::kTextDoesNotFit, "table has no legible cell");
  // 1-px rules; drawn after the text so they do not count as line ink.
  const cv::Rect grid(area.x, area.y, cols * cell_w, rows * cell_h);
  for (int r = 0; r <= rows; ++r) {
    const int y = std::min(grid.y + r * cell_h, grid.br().y - 1);
    cv::line(t.coverage, {grid.x, y}, {grid.br().x - 1, y}, cv::Scalar(255), 1);
  }
  for (int c = 0; c <= cols; ++c) {
    const int x = std::min(grid.x + c * cell_w, grid.br().x - 1);
    cv::line(t.coverage, {x, grid.y}, {x, grid.br().y - 1}, cv::Scalar(255), 1);
  }
  rotate_typeset(t, style.rotation_deg);
  return make_element(ElementClass::kTable, t.coverage, style.ink, std::move(t.lines), style.rotation_deg);
}

int widest(const std::vector<std::vector<std::string>>& lines, const TextStyle& style) {
  const FontRenderer& r = renderer_for(*style.font);
  const int space = space_px(style);
  int best = 0;
  for (const auto& l : lines) {
    int w = 0;
    for (const auto& word : l) w += r.text_width(word, style.size_px);
    w += space * (static_cast<int>(l.size()) - 1);
    best = std::max(best, w);
  }
  return best;
}

// Vertical text reads bottom-to-top: the typeset canvas is turned 90 degrees
// counter-clockwise.
void turn_vertical(RenderedElement& e, cv::Size canvas) {
  const Affine quarter(0, 1, 0, -1, 0, canvas.width - 1);
  cv::rotate(e.raster, e.raster, cv::ROTATE_90_COUNTERCLOCKWISE);
  cv::rotate(e.ink_mask, e.ink_mask, cv::ROTATE_90_COUNTERCLOCKWISE);
  for (auto& l : e.lines) {
    l.to_element = compose(quarter, l.to_element);
    l.rotation_deg += 90.0;
  }
  e.rotation_deg += 90.0;
}

std::vector<std::string> take(const std::vector<std::string>& tokens, std::size_t start, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count && !tokens.empty(); ++i) out.push_back(tokens[(start + i) % tokens.size()]);
  return out;
}

}  // namespace

std::vector<cv::Point2d> line_rect_polygon(const LineMetrics& line, double top, double bottom, double left,
                                           double right, double grow) {
  const double g = 0.5 + grow;
  const cv::Point2d pts[] = {{left - g, top - g}, {right + g, top - g}, {right + g, bottom + g}, {left - g, bottom + g}};
  return apply(line.to_element, pts);
}

std::vector<cv::Point2d> xheight_polygon(const LineMetrics& line, double grow) {
  return line_rect_polygon(line, line.xheight_top_y, line.baseline_y, line.x_left, line.x_right, grow);
}

std::vector<cv::Point2d> bbox_polygon(const LineMetrics& line) {
  const cv::Rect& b = line.line_bbox;
  return line_rect_polygon(line, b.y, b.y + b.height - 1, b.x, b.x + b.width - 1);
}

std::vector<cv::Point2d> baseline_segment(const LineMetrics& line) {
  const cv::Point2d pts[] = {{static_cast<double>(line.x_left), static_cast<double>(line.baseline_y)},
                             {static_cast<double>(line.x_right), static_cast<double>(line.baseline_y)}};
  return apply(line.to_element, pts);
}

std::vector<std::string> tokenize(const TextSnippet& snippet) {
  std::vector<std::string> out;
  if (snippet.script == Script::kChinese) {
    for (auto& cp : code_points(snippet.text)) {
      if (cp != " ") out.push_back(std::move(cp));
    }
    return out;
  }
  std::size_t i = 0;
  const std::string& s = snippet.text;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    const std::size_t j = s.find(' ', i);
    const std::size_t end = j == std::string::npos ? s.size() : j;
    if (end > i) out.push_back(s.substr(i, end - i));
    i = end;
  }
  return out;
}

std::vector<std::vector<std::string>> wrap_words(const std::vector<std::string>& words, const TextStyle& style,
                                                 int max_width) {
  const FontRenderer& r = renderer_for(*style.font);
  const int space = space_px(style);
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> current;
  int width = 0;
  for (const auto& w : words) {
    const int ww = r.text_width(w, style.size_px);
    const int needed = current.empty() ? ww : width + space + ww;
    if (!current.empty() && needed > max_width) {
      lines.push_back(std::move(current));
      current.clear();
      width = ww;
    } else {
      width = needed;
    }
    current.push_back(w);
  }
  if (!current.empty()) lines.push_back(std::move(current));
  return lines;
}

cv::Size rotation_safe_size(cv::Size outer, double degrees) {
  if (degrees == 0.0) return outer;
  const double rad = std::abs(degrees) * CV_PI / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  const double W = outer.width, H = outer.height;
  double w = 0, h = 0;
  if (c * c - s * s > 1e-9) {
    w = (W * c - H * s) / (c * c - s * s);
    h = (H * c - W * s) / (c * c - s * s);
  }
  if (w < 8 || h < 8) {
    const double k = std::min(W / (W * c + H * s), H / (W * s + H * c));
    w = k * W;
    h = k * H;
  }
  return {std::max(1, static_cast<int>(std::floor(w)) - 2), std::max(1, static_cast<int>(std::floor(h)) - 2)};
}

RenderedElement typeset_lines(ElementClass cls, const std::vector<std::vector<std::string>>& lines,
                              const TextStyle& style, cv::Size content, std::optional<int> first_baseline) {
  if (style.font == nullptr) throw Error(ErrorCode::kInvalidConfig, "text style without font");
  const cv::Rect area = centered_area(content, rotation_safe_size(content, style.rotation_deg));
  Typeset t = typeset_area(lines, style, content, area, first_baseline);
  rotate_typeset(t, style.rotation_deg);
  return make_element(cls, t.coverage, style.ink, std::move(t.lines), style.rotation_deg);
}

RenderedElement render_text(const ElementSpec& spec, const AssetStore& store, Rng& rng, const ElementConfig& cfg) {
  const ElementClass cls = spec.element_class;
  if (!is_text_class(cls)) throw Error(ErrorCode::kInvalidConfig, "render_text on a graphical spec");
  const TextStyleConfig& tc = cfg.text;
  const bool vertical = spec.orientation == Orientation::kVertical;
  const cv::Size canvas = vertical ? cv::Size(spec.content.height, spec.content.width) : spec.content.size();

  TextStyle style;
  style.font = &store.text_fonts()[rng.index(store.text_fonts().size())];
  const cv::Vec2d sizes = size_range(tc, cls);
  style.size_px = static_cast<int>(std::lround(rng.uniform(sizes[0], sizes[1])));
  style.line_spacing = rng.uniform(tc.line_spacing[0], tc.line_spacing[1]);
  style.word_spacing = rng.uniform(tc.word_spacing[0], tc.word_spacing[1]);
  const double a = rng.uniform();
  style.alignment = a < tc.p_justify                             ? Alignment::kJustify
                    : a < tc.p_justify + tc.p_center             ? Alignment::kCenter
                    : a < tc.p_justify + tc.p_center + tc.p_right ? Alignment::kRight
                                                                  : Alignment::kLeft;
  if (cls == ElementClass::kTitle && rng.bernoulli(0.6)) style.alignment = Alignment::kCenter;
  style.strikethrough = rng.bernoulli(tc.p_strikethrough);
  style.underline = rng.bernoulli(tc.p_underline);
  style.bounding_box = rng.bernoulli(tc.p_bounding_box);
  const bool rotate = rng.bernoulli(tc.p_rotate);
  const double angle = rng.uniform(-tc.max_rotation_deg, tc.max_rotation_deg);
  style.rotation_deg = (rotate && !vertical) ? angle : 0.0;
  style.ink = sample_ink(rng, cls);

  if (cls == ElementClass::kTable) {
    RenderedElement e = typeset_table(store, rng, cfg, style, canvas);
    if (vertical) turn_vertical(e, canvas);
    return e;
  }

  const TextSnippet& snippet = sample_text(store, rng, tc.script_weights);
  style.right_to_left = snippet.script == Script::kArabic;
  style.no_spaces = snippet.script == Script::kChinese;
  std::vector<std::string> tokens = tokenize(snippet);
  if (tokens.empty()) throw Error(ErrorCode::kTextDoesNotFit, "empty snippet");
  const std::size_t start = rng.index(tokens.size());
  const std::size_t scale = style.no_spaces ? 2 : 1;

  std::vector<std::string> words;
  switch (cls) {
    case ElementClass::kTitle: words = take(tokens, 0, scale * rng.uniform_int(1, 6)); break;
    case ElementClass::kCaption: words = take(tokens, start, scale * rng.uniform_int(3, 14)); break;
    case ElementClass::kFloatingWord: words = take(tokens, start, style.no_spaces ? rng.uniform_int(1, 4) : 1); break;
    default: {
      words = tokens;
      // Paragraphs fill their box: keep appending snippets of the same script.
      ScriptWeights only{};
      only[static_cast<std::size_t>(snippet.script)] = 1.0;
      for (int extra = 0; extra < 12; ++extra) {
        const cv::Size inner = rotation_safe_size(canvas, style.rotation_deg);
        if (wrap_words(words, style, inner.width).size() > static_cast<std::size_t>(line_capacity(style, inner.height))) {
          break;
        }
        for (auto& w : tokenize(sample_text(store, rng, only))) words.push_back(std::move(w));
      }
      break;
    }
  }

  const std::size_t max_lines = cls == ElementClass::kTitle          ? 2
                                : cls == ElementClass::kFloatingWord ? 1
                                                                     : std::numeric_limits<std::size_t>::max();
  std::vector<std::vector<std::string>> lines;
  for (;;) {
    const cv::Size inner = rotation_safe_size(canvas, style.rotation_deg);
    lines = wrap_words(words, style, inner.width);
    const auto capacity = static_cast<std::size_t>(line_capacity(style, inner.height));
    const bool fits = capacity >= 1 && widest(lines, style) <= inner.width &&
                      (cls == ElementClass::kParagraph || lines.size() <= std::min(capacity, max_lines));
    if (fits) {
      if (lines.size() > capacity) lines.resize(capacity);
      break;
    }
    const int smaller = static_cast<int>(std::floor(style.size_px * 0.85));
    if (smaller < tc.min_font_px) {
      // Floor reached: truncate what does not fit.
      if (capacity == 0) throw Error(ErrorCode::kTextDoesNotFit, "content rect too small for any line");
      lines.resize(std::min({lines.size(), capacity, max_lines}));
      break;
    }
    style.size_px = smaller;
  }

  RenderedElement e = typeset_lines(cls, lines, style, canvas);
  if (e.lines.empty()) throw Error(ErrorCode::kTextDoesNotFit, "no line produced ink");
  if (vertical) turn_vertical(e, canvas);
  return e;
}

RenderedElement letterbox_image(const cv::Mat& source, cv::Size content) {
  const double s = std::min(static_cast<double>(content.width) / source.cols,
                            static_cast<double>(content.height) / source.rows);
  const cv::Size fitted(std::clamp(static_cast<int>(std::lround(source.cols * s)), 1, content.width),
                        std::clamp(static_cast<int>(std::lround(source.rows * s)), 1, content.height));
  cv::Mat resized;
  cv::resize(source, resized, fitted, 0, 0, s < 1.0 ? cv::INTER_AREA : cv::INTER_LINEAR);
  const cv::Rect where = centered_area(content, fitted);

  RenderedElement e;
  e.element_class = ElementClass::kImage;
  e.raster = cv::Mat::zeros(content, CV_8UC4);
  cv::Mat bgra;
  cv::cvtColor(resized, bgra, resized.channels() == 1 ? cv::COLOR_GRAY2BGRA : cv::COLOR_BGR2BGRA);
  bgra.copyTo(e.raster(where));
  e.ink_mask = cv::Mat::zeros(content, CV_8UC1);
  e.ink_mask(where).setTo(255);
  return e;
}

RenderedElement render_image(const ElementSpec& spec, const AssetStore& store, Rng& rng) {
  const auto& path = store.images()[rng.index(store.images().size())];
  const cv::Mat source = read_image(path);
  return letterbox_image(source, spec.content.size());
}

cv::Mat dodge_sketch(const cv::Mat& source_bgr, int blur_kernel) {
  cv::Mat base;
  if (source_bgr.channels() == 1) {
    base = source_bgr;
  } else {
    cv::cvtColor(source_bgr, base, cv::COLOR_BGR2GRAY);
  }
  cv::Mat negative = 255 - base;
  cv::Mat blend;
  const int k = blur_kernel | 1;
  cv::GaussianBlur(negative, blend, cv::Size(k, k), 0, 0, cv::BORDER_REFLECT);
  cv::Mat out(base.size(), CV_8UC1);
  for (int y = 0; y < base.rows; ++y) {
    const auto* b = base.ptr<std::uint8_t>(y);
    const auto* l = blend.ptr<std::uint8_t>(y);
    auto* o = out.ptr<std::uint8_t>(y);
    for (int x = 0; x < base.cols; ++x) {
      const int denom = std::max(1, 255 - static_cast<int>(l[x]));
      o[x] = static_cast<std::uint8_t>(std::min(255, b[x] * 255 / denom));
    }
  }
  return out;
}

RenderedElement drawing_from_source(const cv::Mat& source, cv::Size content, const DrawingConfig& cfg) {
  RenderedElement fitted = letterbox_image(source, content);
  const cv::Rect where = cv::boundingRect(fitted.ink_mask);
  cv::Mat bgr;
  cv::cvtColor(fitted.raster(where), bgr, cv::COLOR_BGRA2BGR);
  const cv::Mat sketch = dodge_sketch(bgr, cfg.blur_kernel);

  RenderedElement e;
  e.element_class = ElementClass::kDrawing;
  e.raster = cv::Mat::zeros(content, CV_8UC4);
  e.ink_mask = cv::Mat::zeros(content, CV_8UC1);
  cv::Mat alpha = 255 - sketch;
  std::vector<cv::Mat> channels = {sketch, sketch, sketch, alpha};
  cv::Mat bgra;
  cv::merge(channels, bgra);
  bgra.copyTo(e.raster(where));
  cv::Mat ink;
  cv::compare(sketch, cfg.ink_threshold, ink, cv::CMP_LT);
  ink.copyTo(e.ink_mask(where));
  return e;
}

RenderedElement render_drawing(const ElementSpec& spec, const AssetStore& store, Rng& rng, const DrawingConfig& cfg) {
  const auto& path = store.drawing_sources()[rng.index(store.drawing_sources().size())];
  const cv::Mat source = read_image(path);
  return drawing_from_source(source, spec.content.size(), cfg);
}

RenderedElement glyph_element(const FontFace& font, char letter, cv::Size content) {
  const FontRenderer& r = renderer_for(font);
  const int px = std::clamp(std::min(content.width, content.height), 32, 400);
  const std::string text(1, letter);
  const int width = r.text_width(text, px) + 2 * px;
  cv::Mat cov = cv::Mat::zeros(3 * px, std::max(width, 1), CV_8UC1);
  r.draw(cov, text, px, 2 * px, px);
  const cv::Rect ink = cv::boundingRect(cov);
  if (ink.area() == 0) throw Error(ErrorCode::kGlyphMissing, std::string("no ink for '") + letter + "' in " + font.name);

  const double s = std::min(static_cast<double>(content.width) / ink.width,
                            static_cast<double>(content.height) / ink.height);
  const cv::Size fitted(std::clamp(static_cast<int>(std::floor(ink.width * s)), 1, content.width),
                        std::clamp(static_cast<int>(std::floor(ink.height * s)), 1, content.height));
  cv::Mat scaled;
  cv::resize(cov(ink), scaled, fitted, 0, 0, s < 1.0 ? cv::INTER_AREA : cv::INTER_LINEAR);
  cv::Mat coverage = cv::Mat::zeros(content, CV_8UC1);
  scaled.copyTo(coverage(centered_area(content, fitted)));
  if (cv::countNonZero(coverage) == 0) {
    throw Error(ErrorCode::kGlyphMissing, std::string("glyph '") + letter + "' vanished when scaled");
  }
  return make_element(ElementClass::kGlyph, coverage, cv::Scalar(20, 20, 20), {}, 0.0);
}

RenderedElement render_glyph(const ElementSpec& spec, const AssetStore& store, Rng& rng) {
  const auto& fonts = store.decorated_fonts();
  for (int attempt = 0; attempt < 8; ++attempt) {
    const FontFace& font = fonts[rng.index(fonts.size())];
    const char letter = static_cast<char>('A' + rng.uniform_int(0, 25));
    const double u = rng.uniform();
    const cv::Scalar ink = u < 0.4   ? cv::Scalar(rng.uniform(0, 40), rng.uniform(0, 40), rng.uniform(120, 200))
                           : u < 0.6 ? cv::Scalar(rng.uniform(100, 160), rng.uniform(30, 70), rng.uniform(0, 40))
                           : u < 0.75 ? cv::Scalar(rng.uniform(20, 60), rng.uniform(120, 170), rng.uniform(170, 220))
                                      : cv::Scalar::all(rng.uniform(0, 50));
    try {
      RenderedElement e = glyph_element(font, letter, spec.content.size());
      std::vector<cv::Mat> ch;
      cv::split(e.raster, ch);
      for (int i = 0; i < 3; ++i) ch[static_cast<std::size_t>(i)].setTo(ink[i]);
      cv::merge(ch, e.raster);
      return e;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kGlyphMissing) throw;
    }
  }
  throw Error(ErrorCode::kGlyphMissing, "no decorated font produced a glyph");
}

RenderedElement render_element(const ElementSpec& spec, const AssetStore& store, Rng& rng, const ElementConfig& cfg) {
  RenderedElement e;
  switch (spec.element_class) {
    case ElementClass::kImage: e = render_image(spec, store, rng); break;
    case ElementClass::kDrawing: e = render_drawing(spec, store, rng, cfg.drawing); break;
    case ElementClass::kGlyph: e = render_glyph(spec, store, rng); break;
    default: e = render_text(spec, store, rng, cfg); break;
  }
  e.element_class = spec.element_class;
  e.placement = spec.content.tl();
  return e;
}

ElementAugmentation sample_element_augmentation(Rng& rng, const ElementAugmentConfig& cfg) {
  ElementAugmentation aug;
  const bool blur = rng.bernoulli(cfg.p_blur);
  const double sigma = rng.uniform(cfg.blur_sigma[0], cfg.blur_sigma[1]);
  const bool recolor = rng.bernoulli(cfg.p_recolor);
  const cv::Scalar color(rng.uniform(0, 120), rng.uniform(0, 90), rng.uniform(0, 160));
  const bool fade = rng.bernoulli(cfg.p_opacity);
  const double opacity = rng.uniform(cfg.opacity[0], cfg.opacity[1]);
  if (blur) aug.blur_sigma = sigma;
  if (recolor) aug.color = color;
  if (fade) aug.opacity = opacity;
  return aug;
}

RenderedElement apply_element_augmentations(RenderedElement element, const ElementAugmentation& aug) {
  // The raster header may share pixels with the caller's copy.
  element.raster = element.raster.clone();
  cv::Mat& r = element.raster;
  if (aug.color && element.element_class != ElementClass::kImage) {
    std::vector<cv::Mat> ch;
    cv::split(r, ch);
    for (int i = 0; i < 3; ++i) ch[static_cast<std::size_t>(i)].setTo((*aug.color)[i], ch[3] > 0);
    cv::merge(ch, r);
  }
  if (aug.blur_sigma && *aug.blur_sigma > 0.0) {
    cv::GaussianBlur(r, r, cv::Size(0, 0), *aug.blur_sigma, *aug.blur_sigma, cv::BORDER_CONSTANT);
  }
  if (aug.opacity != 1.0 || aug.blur_sigma) {
    std::vector<cv::Mat> ch;
    cv::split(r, ch);
    ch[3].convertTo(ch[3], CV_8U, aug.opacity);
    // Keep every ink pixel at least faintly visible.
    cv::Mat floor_alpha;
    cv::min(element.ink_mask, 1, floor_alpha);
    cv::max(ch[3], floor_alpha, ch[3]);
    cv::merge(ch, r);
  }
  return element;
}

RenderedElement apply_element_augmentations(RenderedElement element, Rng& rng, const ElementAugmentConfig& cfg) {
  return apply_element_augmentations(std::move(element), sample_element_augmentation(rng, cfg));
}

void blend_onto(cv::Mat& canvas, const cv::Mat& bgra, cv::Point offset, double opacity) {
  CV_Assert(canvas.type() == CV_8UC3 && bgra.type() == CV_8UC4);
  const cv::Rect target = cv::Rect(offset, bgra.size()) & cv::Rect(0, 0, canvas.cols, canvas.rows);
  if (target.area() == 0) return;
  const int scale = static_cast<int>(std::lround(std::clamp(opacity, 0.0, 1.0) * 256));
  for (int y = target.y; y < target.br().y; ++y) {
    auto* dst = canvas.ptr<cv::Vec3b>(y);
    const auto* src = bgra.ptr<cv::Vec4b>(y - offset.y);
    for (int x = target.x; x < target.br().x; ++x) {
      const cv::Vec4b& s = src[x - offset.x];
      const int a = (s[3] * scale + 128) >> 8;
      if (a == 0) continue;
      cv::Vec3b& d = dst[x];
      for (int c = 0; c < 3; ++c) d[c] = static_cast<std::uint8_t>((d[c] * (255 - a) + s[c] * a + 127) / 255);
    }
  }
}

cv::Mat compose_page(const cv::Mat& background, std::span<const RenderedElement> elements) {
  cv::Mat page = background.clone();
  const cv::Rect bounds(0, 0, page.cols, page.rows);
  for (const auto& e : elements) {
    if ((e.page_rect() & bounds) != e.page_rect()) {
      spdlog::debug("OverflowElement: {} at ({}, {}) clipped to page", to_string(e.element_class), e.placement.x,
                    e.placement.y);
    }
    blend_onto(page, e.raster, e.placement);
  }
  return page;
}

std::vector<LineMetrics> page_lines(const RenderedElement& element) {
  std::vector<LineMetrics> out = element.lines;
  const Affine shift = translation(element.placement.x, element.placement.y);
  for (auto& l : out) l.to_element = compose(shift, l.to_element);
  return out;
}

}  // namespace docsynth
