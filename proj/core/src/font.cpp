#include "docsynth/font.hpp"

#include <opencv2/freetype.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <unordered_map>
#include <vector>

#include "docsynth/error.hpp"

namespace docsynth {

namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFontParseError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class ByteReader {
 public:
  ByteReader(const std::vector<std::uint8_t>& data, const std::filesystem::path& path)
      : data_(data), path_(path) {}

  std::uint32_t u32(std::size_t off) const {
    need(off, 4);
    return (std::uint32_t{data_[off]} << 24) | (std::uint32_t{data_[off + 1]} << 16) |
           (std::uint32_t{data_[off + 2]} << 8) | data_[off + 3];
  }
  std::uint16_t u16(std::size_t off) const {
    need(off, 2);
    return static_cast<std::uint16_t>((data_[off] << 8) | data_[off + 1]);
  }
  std::int16_t i16(std::size_t off) const { return static_cast<std::int16_t>(u16(off)); }
  std::size_t size() const { return data_.size(); }

 private:
  void need(std::size_t off, std::size_t n) const {
    if (off + n > data_.size()) throw Error(ErrorCode::kFontParseError, "truncated sfnt: " + path_.string());
  }
  const std::vector<std::uint8_t>& data_;
  const std::filesystem::path& path_;
};

constexpr std::uint32_t tag(const char (&t)[5]) {
  return (std::uint32_t(std::uint8_t(t[0])) << 24) | (std::uint32_t(std::uint8_t(t[1])) << 16) |
         (std::uint32_t(std::uint8_t(t[2])) << 8) | std::uint32_t(std::uint8_t(t[3]));
}

constexpr int kReferencePx = 200;

}  // namespace

FontMetrics read_sfnt_metrics(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  const ByteReader r(bytes, path);
  std::size_t base = 0;
  std::uint32_t version = r.u32(0);
  if (version == tag("ttcf")) {
    base = r.u32(12);
    version = r.u32(base);
  }
  if (version != 0x00010000u && version != tag("OTTO") && version != tag("true")) {
    throw Error(ErrorCode::kFontParseError, "not an sfnt font: " + path.string());
  }
  const std::uint16_t num_tables = r.u16(base + 4);
  std::size_t head = 0, hhea = 0, os2 = 0;
  std::size_t os2_len = 0;
  for (std::uint16_t i = 0; i < num_tables; ++i) {
    const std::size_t rec = base + 12 + std::size_t{i} * 16;
    const std::uint32_t t = r.u32(rec);
    const std::size_t off = r.u32(rec + 8);
    const std::size_t len = r.u32(rec + 12);
    if (off + len > r.size()) throw Error(ErrorCode::kFontParseError, "table past EOF: " + path.string());
    if (t == tag("head")) head = off;
    if (t == tag("hhea")) hhea = off;
    if (t == tag("OS/2")) {
      os2 = off;
      os2_len = len;
    }
  }
  if (head == 0 || hhea == 0) throw Error(ErrorCode::kFontParseError, "missing head/hhea: " + path.string());

  FontMetrics m;
  m.units_per_em = r.u16(head + 18);
  if (m.units_per_em < 16) throw Error(ErrorCode::kFontParseError, "bad unitsPerEm: " + path.string());
  const double em = m.units_per_em;
  m.ascent = r.i16(hhea + 4) / em;
  m.descent = -r.i16(hhea + 6) / em;
  if (os2 != 0 && os2_len >= 90 && r.u16(os2) >= 2) {
    const std::int16_t sx_height = r.i16(os2 + 86);
    if (sx_height > 0) m.x_height = sx_height / em;
  }
  if (!(m.ascent > 0.0) || m.descent < 0.0) {
    throw Error(ErrorCode::kFontParseError, "bad vertical metrics: " + path.string());
  }
  return m;
}

FontFace load_font_face(const std::filesystem::path& path) {
  FontFace face;
  face.path = path;
  face.name = path.stem().string();
  face.metrics = read_sfnt_metrics(path);
  // Opening it here surfaces faces FreeType rejects at load time rather than
  // in a generation worker.
  FontRenderer renderer(path);
  if (!(face.metrics.x_height > 0.0)) {
    const int measured = renderer.measured_x_height(kReferencePx);
    if (measured <= 0) {
      throw Error(ErrorCode::kFontParseError, "no x-height metric and no ink for 'x': " + path.string());
    }
    face.metrics.x_height = static_cast<double>(measured) / kReferencePx;
    face.metrics.x_height_measured = true;
  }
  return face;
}

struct FontRenderer::Impl {
  cv::Ptr<cv::freetype::FreeType2> ft;
  mutable std::unordered_map<int, int> x_height_cache;
  mutable cv::Mat scratch;
};

FontRenderer::FontRenderer(const std::filesystem::path& path) : impl_(std::make_unique<Impl>()) {
  try {
    impl_->ft = cv::freetype::createFreeType2();
    impl_->ft->loadFontData(path.string(), 0);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::kFontParseError, "FreeType cannot load " + path.string());
  }
}

FontRenderer::~FontRenderer() = default;

int FontRenderer::text_width(std::string_view text, int px) const {
  if (text.empty()) return 0;
  int baseline = 0;
  return impl_->ft->getTextSize(std::string(text), px, -1, &baseline).width;
}

void FontRenderer::draw(cv::Mat& coverage, std::string_view text, int pen_x, int baseline_y, int px) const {
  CV_Assert(coverage.type() == CV_8UC1);
  if (text.empty()) return;
  // FreeType2::putText only draws into 3-channel images.
  cv::Mat& rgb = impl_->scratch;
  rgb.create(coverage.size(), CV_8UC3);
  rgb.setTo(cv::Scalar::all(0));
  impl_->ft->putText(rgb, std::string(text), {pen_x, baseline_y + 1}, px, cv::Scalar::all(255), -1,
                     cv::LINE_AA, true);
  cv::Mat channel;
  cv::extractChannel(rgb, channel, 0);
  cv::max(coverage, channel, coverage);
}

cv::Rect FontRenderer::ink_box(std::string_view text, int px) const {
  const int pad = px;
  const int width = text_width(text, px) + 2 * pad;
  cv::Mat cov = cv::Mat::zeros(4 * px, std::max(width, 1), CV_8UC1);
  const int baseline = 3 * px;
  draw(cov, text, pad, baseline, px);
  const cv::Rect box = cv::boundingRect(cov);
  return {box.x - pad, box.y - baseline, box.width, box.height};
}

int FontRenderer::measured_x_height(int px) const {
  if (auto it = impl_->x_height_cache.find(px); it != impl_->x_height_cache.end()) return it->second;
  const cv::Rect box = ink_box("x", px);
  // Ink must end on (or within a row of) the baseline for the measurement to
  // be an x-height.
  const int bottom = box.y + box.height - 1;
  const int h = (box.area() > 0 && std::abs(bottom) <= 1) ? -box.y : 0;
  impl_->x_height_cache.emplace(px, h);
  return h;
}

FontRenderer& renderer_for(const FontFace& face) {
  thread_local std::unordered_map<std::string, std::unique_ptr<FontRenderer>> cache;
  auto& slot = cache[face.path.string()];
  if (!slot) slot = std::make_unique<FontRenderer>(face.path);
  return *slot;
}

int x_height_px(const FontFace& face, int px) {
  const int measured = renderer_for(face).measured_x_height(px);
  if (measured > 0) return measured;
  return std::max(1, static_cast<int>(std::lround(face.metrics.x_height * px)));
}

}  // namespace docsynth
