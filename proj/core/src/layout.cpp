#include "docsynth/layout.hpp"

#include <algorithm>
#include <cmath>

#include "docsynth/error.hpp"

namespace docsynth {

namespace {

// Boundaries of `n` parts over [origin, origin + length], interior ones
// jittered by up to `jitter` of a part. Always strictly increasing.
std::vector<int> split(int origin, int length, int n, double jitter, Rng& rng) {
  std::vector<int> b(static_cast<std::size_t>(n) + 1);
  const double part = static_cast<double>(length) / n;
  b.front() = origin;
  b.back() = origin + length;
  for (int i = 1; i < n; ++i) {
    const double shift = jitter > 0.0 ? rng.uniform(-jitter, jitter) * part : 0.0;
    b[static_cast<std::size_t>(i)] = origin + static_cast<int>(std::lround(i * part + shift));
  }
  for (int i = 1; i <= n; ++i) {
    auto& cur = b[static_cast<std::size_t>(i)];
    cur = std::max(cur, b[static_cast<std::size_t>(i) - 1] + 1);
  }
  b.back() = origin + length;
  return b;
}

int margin(int extent, const LayoutConfig& cfg, Rng& rng) {
  return static_cast<int>(std::lround(rng.uniform(cfg.margin_min, cfg.margin_max) * extent));
}

}  // namespace

void LayoutConfig::validate() const {
  if (min_rows < 1 || min_cols < 1 || max_rows < min_rows || max_cols < min_cols) {
    throw Error(ErrorCode::kInvalidBounds, "grid bounds must satisfy 1 <= min <= max");
  }
  if (jitter < 0.0 || jitter >= 0.5) throw Error(ErrorCode::kInvalidBounds, "jitter must be in [0, 0.5)");
  if (page_margin < 0.0 || page_margin >= 0.5) throw Error(ErrorCode::kInvalidBounds, "page_margin must be in [0, 0.5)");
  if (margin_min < 0.0 || margin_max < margin_min || margin_max >= 0.5) {
    throw Error(ErrorCode::kInvalidBounds, "margins must satisfy 0 <= min <= max < 0.5");
  }
  if (p_empty < 0.0 || p_empty > 1.0 || p_caption < 0.0 || p_caption > 1.0) {
    throw Error(ErrorCode::kInvalidConfig, "layout probabilities must be in [0, 1]");
  }
  if (min_content < 1) throw Error(ErrorCode::kInvalidBounds, "min_content must be positive");
  if (std::all_of(class_weights.begin(), class_weights.end(), [](double w) { return w <= 0.0; })) {
    throw Error(ErrorCode::kInvalidConfig, "class weights are all zero");
  }
}

bool ElementSpec::valid(int min_content) const {
  if (content.width < min_content || content.height < min_content) return false;
  if ((content & cell) != content) return false;
  if (!captions.empty() && !is_graphical_class(element_class)) return false;
  return std::all_of(captions.begin(), captions.end(), [&](const ElementSpec& c) {
    return c.element_class == ElementClass::kCaption && c.captions.empty() && c.valid(1) &&
           (c.content & cell) == c.content && (c.content & content).area() == 0;
  });
}

cv::Rect usable_area(const cv::Rect& page_region, double page_margin) {
  const int dx = static_cast<int>(std::lround(page_region.width * page_margin));
  const int dy = static_cast<int>(std::lround(page_region.height * page_margin));
  return {page_region.x + dx, page_region.y + dy, std::max(1, page_region.width - 2 * dx),
          std::max(1, page_region.height - 2 * dy)};
}

GridLayout sample_layout(cv::Size page_size, const cv::Rect& usable, Rng& rng, const LayoutConfig& cfg) {
  cfg.validate();
  if (page_size.width <= 0 || page_size.height <= 0 || usable.area() <= 0 ||
      (usable & cv::Rect({0, 0}, page_size)) != usable) {
    throw Error(ErrorCode::kInvalidBounds, "usable area must be non-empty and inside the page");
  }
  GridLayout layout;
  layout.page_size = page_size;
  layout.usable = usable;
  layout.rows = std::min(rng.uniform_int(cfg.min_rows, cfg.max_rows), usable.height);
  layout.cols = std::min(rng.uniform_int(cfg.min_cols, cfg.max_cols), usable.width);
  const auto row_b = split(usable.y, usable.height, layout.rows, cfg.jitter, rng);
  for (int r = 0; r < layout.rows; ++r) {
    // Column boundaries are drawn per row so the grid is not a strict lattice.
    const auto col_b = split(usable.x, usable.width, layout.cols, cfg.jitter, rng);
    for (int c = 0; c < layout.cols; ++c) {
      layout.cells.emplace_back(col_b[c], row_b[r], col_b[c + 1] - col_b[c], row_b[r + 1] - row_b[r]);
    }
  }
  return layout;
}

std::vector<ElementSpec> fill_layout(const GridLayout& layout, Rng& rng, const LayoutConfig& cfg) {
  cfg.validate();
  std::vector<ElementSpec> specs;
  for (const cv::Rect& cell : layout.cells) {
    if (rng.bernoulli(cfg.p_empty)) continue;
    ElementSpec spec;
    spec.element_class = static_cast<ElementClass>(rng.weighted(cfg.class_weights) + 1);
    spec.cell = cell;
    spec.seed = rng.next_u64();
    bool placed = false;
    for (int attempt = 0; attempt < 3 && !placed; ++attempt) {
      spec.margins = {margin(cell.height, cfg, rng), margin(cell.height, cfg, rng), margin(cell.width, cfg, rng),
                      margin(cell.width, cfg, rng)};
      spec.content = cv::Rect(cell.x + spec.margins.left, cell.y + spec.margins.top,
                              cell.width - spec.margins.left - spec.margins.right,
                              cell.height - spec.margins.top - spec.margins.bottom);
      placed = spec.valid(cfg.min_content);
    }
    if (!placed) continue;

    if (is_graphical_class(spec.element_class)) {
      const bool horizontal = rng.bernoulli(cfg.p_caption);
      const bool vertical = rng.bernoulli(cfg.p_caption);
      const double h_frac = rng.uniform(0.12, 0.22);
      const double v_frac = rng.uniform(0.12, 0.22);
      const std::uint64_t h_seed = rng.next_u64();
      const std::uint64_t v_seed = rng.next_u64();
      const int gap = std::max(2, spec.content.height / 50);
      if (horizontal) {
        const int h = std::max(16, static_cast<int>(std::lround(spec.content.height * h_frac)));
        if (spec.content.height - h - gap >= cfg.min_content) {
          ElementSpec cap;
          cap.element_class = ElementClass::kCaption;
          cap.cell = cell;
          cap.orientation = Orientation::kHorizontal;
          cap.seed = h_seed;
          cap.content = cv::Rect(spec.content.x, spec.content.br().y - h, spec.content.width, h);
          spec.content.height -= h + gap;
          spec.captions.push_back(cap);
        }
      }
      if (vertical) {
        const int w = std::max(16, static_cast<int>(std::lround(spec.content.width * v_frac)));
        if (spec.content.width - w - gap >= cfg.min_content) {
          ElementSpec cap;
          cap.element_class = ElementClass::kCaption;
          cap.cell = cell;
          cap.orientation = Orientation::kVertical;
          cap.seed = v_seed;
          cap.content = cv::Rect(spec.content.br().x - w, spec.content.y, w, spec.content.height);
          spec.content.width -= w + gap;
          spec.captions.push_back(cap);
        }
      }
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<ElementSpec> flatten(const std::vector<ElementSpec>& specs) {
  std::vector<ElementSpec> out;
  for (const auto& s : specs) {
    ElementSpec parent = s;
    parent.captions.clear();
    out.push_back(std::move(parent));
    for (const auto& c : s.captions) out.push_back(c);
  }
  return out;
}

}  // namespace docsynth
