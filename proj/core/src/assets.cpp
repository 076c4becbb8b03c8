#include "docsynth/assets.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <nlohmann/json.hpp>
#include <opencv2/imgproc.hpp>
#include <sstream>

#include "docsynth/error.hpp"
#include "docsynth/image_io.hpp"

namespace fs = std::filesystem;

namespace docsynth {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool has_extension(const fs::path& p, std::initializer_list<std::string_view> exts) {
  const std::string ext = lower(p.extension().string());
  return std::any_of(exts.begin(), exts.end(), [&](std::string_view e) { return ext == e; });
}

// Sorted so pool order, and therefore every seeded draw, is stable.
std::vector<fs::path> list_files(const fs::path& dir, std::initializer_list<std::string_view> exts) {
  std::vector<fs::path> files;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && has_extension(entry.path(), exts)) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

const std::initializer_list<std::string_view> kImageExts = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"};
const std::initializer_list<std::string_view> kFontExts = {".ttf", ".otf", ".ttc"};

std::vector<cv::Mat> load_images(const fs::path& dir, const char* pool, int max_side) {
  std::vector<cv::Mat> out;
  for (const auto& file : list_files(dir, kImageExts)) {
    cv::Mat img;
    try {
      img = read_image(file);
    } catch (const Error& e) {
      spdlog::warn("skipping {} image {}: {}", pool, file.string(), e.what());
      continue;
    }
    const int longest = std::max(img.cols, img.rows);
    if (max_side > 0 && longest > max_side) {
      const double s = static_cast<double>(max_side) / longest;
      cv::resize(img, img, {}, s, s, cv::INTER_AREA);
    }
    out.push_back(std::move(img));
  }
  return out;
}

std::vector<FontFace> load_fonts(const fs::path& dir, const char* pool, std::size_t& skipped) {
  std::vector<FontFace> out;
  for (const auto& file : list_files(dir, kFontExts)) {
    try {
      out.push_back(load_font_face(file));
    } catch (const Error& e) {
      ++skipped;
      spdlog::warn("skipping {} font {}: {}", pool, file.string(), e.what());
    }
  }
  return out;
}

[[noreturn]] void missing(const char* pool, const fs::path& dir) {
  throw Error(ErrorCode::kMissingPool, std::string(pool) + " pool is empty (" + dir.string() + ")");
}

}  // namespace

std::string_view to_string(Script s) {
  switch (s) {
    case Script::kLatin: return "latin";
    case Script::kArabic: return "arabic";
    case Script::kChinese: return "chinese";
  }
  return "latin";
}

std::optional<Script> script_from_string(std::string_view name) {
  for (Script s : {Script::kLatin, Script::kArabic, Script::kChinese}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

AssetManifest AssetManifest::load(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open asset manifest " + file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, "asset manifest " + file.string() + ": " + e.what());
  }
  AssetManifest m;
  m.root = file.parent_path() / j.value("root", std::string("."));
  auto sub = [&](const char* key, fs::path& field) {
    if (j.contains(key)) field = j.at(key).get<std::string>();
  };
  sub("backgrounds", m.backgrounds);
  sub("context_images", m.context_images);
  sub("text_fonts", m.text_fonts);
  sub("decorated_fonts", m.decorated_fonts);
  sub("images", m.images);
  sub("drawing_sources", m.drawing_sources);
  sub("corpus", m.corpus);
  for (const fs::path* p : {&m.backgrounds, &m.context_images, &m.text_fonts, &m.decorated_fonts, &m.images,
                            &m.drawing_sources, &m.corpus}) {
    if (!fs::exists(m.resolve(*p))) {
      throw Error(ErrorCode::kMissingPool, "manifest path does not exist: " + m.resolve(*p).string());
    }
  }
  return m;
}

std::vector<std::string> split_paragraphs(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line, current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  while (std::getline(in, line)) {
    std::string collapsed;
    bool space = false;
    for (char c : line) {
      if (c == ' ' || c == '\t' || c == '\r') {
        space = !collapsed.empty();
      } else {
        if (space) collapsed.push_back(' ');
        collapsed.push_back(c);
        space = false;
      }
    }
    if (collapsed.empty()) {
      flush();
    } else {
      if (!current.empty()) current.push_back(' ');
      current += collapsed;
    }
  }
  flush();
  return out;
}

AssetStore AssetStore::load(const AssetManifest& manifest) {
  AssetStore store;
  store.backgrounds_ = load_images(manifest.resolve(manifest.backgrounds), "background", kMaxBackgroundSide);
  store.context_images_ = load_images(manifest.resolve(manifest.context_images), "context", kMaxBackgroundSide);
  store.text_fonts_ = load_fonts(manifest.resolve(manifest.text_fonts), "text", store.skipped_fonts_);
  store.decorated_fonts_ = load_fonts(manifest.resolve(manifest.decorated_fonts), "decorated", store.skipped_fonts_);
  store.images_ = list_files(manifest.resolve(manifest.images), kImageExts);
  store.drawing_sources_ = list_files(manifest.resolve(manifest.drawing_sources), kImageExts);

  for (const auto& file : list_files(manifest.resolve(manifest.corpus), {".txt"})) {
    const std::string stem = lower(file.stem().string());
    std::optional<Script> script;
    for (Script s : {Script::kLatin, Script::kArabic, Script::kChinese}) {
      if (stem.starts_with(to_string(s))) script = s;
    }
    if (!script) {
      spdlog::warn("corpus file {} has no script tag prefix; skipped", file.string());
      continue;
    }
    std::ifstream in(file, std::ios::binary);
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    for (auto& p : split_paragraphs(text)) store.corpus_.push_back({std::move(p), *script});
  }

  if (store.backgrounds_.empty()) missing("background", manifest.resolve(manifest.backgrounds));
  if (store.context_images_.empty()) missing("context", manifest.resolve(manifest.context_images));
  if (store.text_fonts_.empty()) missing("text font", manifest.resolve(manifest.text_fonts));
  if (store.decorated_fonts_.empty()) missing("decorated font", manifest.resolve(manifest.decorated_fonts));
  if (store.images_.empty()) missing("image", manifest.resolve(manifest.images));
  if (store.drawing_sources_.empty()) missing("drawing", manifest.resolve(manifest.drawing_sources));
  store.validate_and_index();

  const PoolSizes s = store.sizes();
  spdlog::info("assets: {} backgrounds, {} context, {} text fonts, {} decorated fonts, {} snippets, {} images, {} drawings",
               s.backgrounds, s.context_images, s.text_fonts, s.decorated_fonts, s.snippets, s.images,
               s.drawing_sources);
  return store;
}

AssetStore AssetStore::from_pools(std::vector<cv::Mat> backgrounds, std::vector<cv::Mat> context_images,
                                  std::vector<FontFace> text_fonts, std::vector<FontFace> decorated_fonts,
                                  std::vector<TextSnippet> corpus, std::vector<fs::path> images,
                                  std::vector<fs::path> drawing_sources) {
  AssetStore store;
  store.backgrounds_ = std::move(backgrounds);
  store.context_images_ = std::move(context_images);
  store.text_fonts_ = std::move(text_fonts);
  store.decorated_fonts_ = std::move(decorated_fonts);
  store.corpus_ = std::move(corpus);
  store.images_ = std::move(images);
  store.drawing_sources_ = std::move(drawing_sources);
  if (store.backgrounds_.empty()) missing("background", {});
  if (store.context_images_.empty()) missing("context", {});
  if (store.text_fonts_.empty()) missing("text font", {});
  if (store.decorated_fonts_.empty()) missing("decorated font", {});
  if (store.images_.empty()) missing("image", {});
  if (store.drawing_sources_.empty()) missing("drawing", {});
  store.validate_and_index();
  return store;
}

void AssetStore::validate_and_index() {
  if (corpus_.empty()) throw Error(ErrorCode::kCorpusEmpty, "no text snippets found");
  for (auto& v : by_script_) v.clear();
  for (std::size_t i = 0; i < corpus_.size(); ++i) {
    by_script_[static_cast<std::size_t>(corpus_[i].script)].push_back(i);
  }
  for (const FontFace& f : text_fonts_) {
    if (!(f.metrics.x_height > 0.0) || !std::isfinite(f.metrics.x_height)) {
      throw Error(ErrorCode::kFontParseError, "text font without x-height: " + f.path.string());
    }
  }
}

PoolSizes AssetStore::sizes() const {
  return {backgrounds_.size(), context_images_.size(), text_fonts_.size(), decorated_fonts_.size(),
          corpus_.size(),      images_.size(),         drawing_sources_.size()};
}

AssetStore load_assets(const AssetManifest& manifest) { return AssetStore::load(manifest); }

void BackgroundConfig::validate() const {
  if (p_double < 0.0 || p_context < 0.0 || p_double + p_context > 1.0 + 1e-12) {
    throw Error(ErrorCode::kInvalidConfig, "background probabilities must be >= 0 and sum to <= 1");
  }
}

cv::Mat make_double_page(const cv::Mat& page) {
  cv::Mat mirrored;
  cv::flip(page, mirrored, 1);
  cv::Mat out;
  cv::hconcat(page, mirrored, out);
  return out;
}

Background paste_on_context(const cv::Mat& page, const cv::Mat& context, Rng& rng, double min_scale) {
  cv::Mat ctx = context;
  const double need = std::max({1.0, min_scale * page.cols / static_cast<double>(context.cols),
                                min_scale * page.rows / static_cast<double>(context.rows)});
  if (need > 1.0) {
    const cv::Size size(static_cast<int>(std::ceil(context.cols * need)),
                        static_cast<int>(std::ceil(context.rows * need)));
    cv::resize(context, ctx, size, 0, 0, cv::INTER_LINEAR);
  } else {
    ctx = context.clone();
  }
  const int x = rng.uniform_int(0, ctx.cols - page.cols);
  const int y = rng.uniform_int(0, ctx.rows - page.rows);
  const cv::Rect region(x, y, page.cols, page.rows);
  page.copyTo(ctx(region));
  return {ctx, region, BackgroundKind::kContext};
}

Background sample_background(const AssetStore& store, Rng& rng, const BackgroundConfig& cfg) {
  const cv::Mat& page = store.backgrounds()[rng.index(store.backgrounds().size())];
  const double u = rng.uniform();
  if (u < cfg.p_double) {
    cv::Mat doubled = make_double_page(page);
    return {doubled, cv::Rect(0, 0, doubled.cols, doubled.rows), BackgroundKind::kDoublePage};
  }
  if (u < cfg.p_double + cfg.p_context) {
    const cv::Mat& ctx = store.context_images()[rng.index(store.context_images().size())];
    return paste_on_context(page, ctx, rng);
  }
  return {page.clone(), cv::Rect(0, 0, page.cols, page.rows), BackgroundKind::kPlain};
}

const TextSnippet& sample_text(const AssetStore& store, Rng& rng, const ScriptWeights& weights) {
  for (std::size_t s = 0; s < kScriptCount; ++s) {
    if (weights[s] > 0.0 && store.snippets_of(static_cast<Script>(s)).empty()) {
      throw Error(ErrorCode::kNoSnippetForScript,
                  "no snippet for script " + std::string(to_string(static_cast<Script>(s))));
    }
  }
  const int s = rng.weighted(weights);
  if (s < 0) throw Error(ErrorCode::kInvalidConfig, "script weights are all zero");
  const auto& pool = store.snippets_of(static_cast<Script>(s));
  return store.corpus()[pool[rng.index(pool.size())]];
}

}  // namespace docsynth
