#pragma once

#include <opencv2/core.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "docsynth/font.hpp"
#include "docsynth/rng.hpp"

namespace docsynth {

enum class Script : std::uint8_t { kLatin = 0, kArabic = 1, kChinese = 2 };
inline constexpr std::size_t kScriptCount = 3;

std::string_view to_string(Script s);
std::optional<Script> script_from_string(std::string_view name);

/// Relative draw weights indexed by Script.
using ScriptWeights = std::array<double, kScriptCount>;

struct TextSnippet {
  std::string text;
  Script script = Script::kLatin;
};

/// Where the pools live. Loaded from a JSON file whose keys name
/// sub-directories relative to `root` (itself relative to the file):
///
///   { "root": ".", "backgrounds": "backgrounds", "context_images": "context",
///     "text_fonts": "fonts/text", "decorated_fonts": "fonts/decorated",
///     "images": "images", "drawing_sources": "drawings", "corpus": "corpus" }
///
/// Corpus files are UTF-8 `.txt` files whose name starts with the script tag
/// (`latin`, `arabic`, `chinese`); blank lines separate snippets.
struct AssetManifest {
  std::filesystem::path root;
  std::filesystem::path backgrounds = "backgrounds";
  std::filesystem::path context_images = "context";
  std::filesystem::path text_fonts = "fonts/text";
  std::filesystem::path decorated_fonts = "fonts/decorated";
  std::filesystem::path images = "images";
  std::filesystem::path drawing_sources = "drawings";
  std::filesystem::path corpus = "corpus";

  static AssetManifest load(const std::filesystem::path& file);
  std::filesystem::path resolve(const std::filesystem::path& sub) const { return root / sub; }
};

struct PoolSizes {
  std::size_t backgrounds = 0;
  std::size_t context_images = 0;
  std::size_t text_fonts = 0;
  std::size_t decorated_fonts = 0;
  std::size_t snippets = 0;
  std::size_t images = 0;
  std::size_t drawing_sources = 0;
};

/// Immutable pools the generator samples from. Safe to share between
/// threads once constructed.
class AssetStore {
 public:
  /// Loads every pool. Corrupt fonts are skipped with a warning; an empty
  /// pool throws MissingPool (or CorpusEmpty for the corpus).
  static AssetStore load(const AssetManifest& manifest);

  /// Backgrounds are capped to this longer side on load.
  static constexpr int kMaxBackgroundSide = 2048;

  const std::vector<cv::Mat>& backgrounds() const { return backgrounds_; }
  const std::vector<cv::Mat>& context_images() const { return context_images_; }
  const std::vector<FontFace>& text_fonts() const { return text_fonts_; }
  const std::vector<FontFace>& decorated_fonts() const { return decorated_fonts_; }
  const std::vector<TextSnippet>& corpus() const { return corpus_; }
  const std::vector<std::size_t>& snippets_of(Script s) const { return by_script_[static_cast<std::size_t>(s)]; }
  /// Image and drawing pools are kept as paths and decoded on use.
  const std::vector<std::filesystem::path>& images() const { return images_; }
  const std::vector<std::filesystem::path>& drawing_sources() const { return drawing_sources_; }

  PoolSizes sizes() const;
  std::size_t skipped_fonts() const { return skipped_fonts_; }

  /// Builds a store from in-memory pools (used by tests and tools).
  /// Validates the same non-empty invariants as load().
  static AssetStore from_pools(std::vector<cv::Mat> backgrounds, std::vector<cv::Mat> context_images,
                               std::vector<FontFace> text_fonts, std::vector<FontFace> decorated_fonts,
                               std::vector<TextSnippet> corpus, std::vector<std::filesystem::path> images,
                               std::vector<std::filesystem::path> drawing_sources);

 private:
  AssetStore() = default;
  void validate_and_index();

  std::vector<cv::Mat> backgrounds_;
  std::vector<cv::Mat> context_images_;
  std::vector<FontFace> text_fonts_;
  std::vector<FontFace> decorated_fonts_;
  std::vector<TextSnippet> corpus_;
  std::array<std::vector<std::size_t>, kScriptCount> by_script_;
  std::vector<std::filesystem::path> images_;
  std::vector<std::filesystem::path> drawing_sources_;
  std::size_t skipped_fonts_ = 0;
};

AssetStore load_assets(const AssetManifest& manifest);

/// Splits UTF-8 text into snippets at blank lines, collapsing whitespace.
std::vector<std::string> split_paragraphs(std::string_view text);

struct BackgroundConfig {
  double p_double = 0.3;
  double p_context = 0.3;
  void validate() const;
};

enum class BackgroundKind : std::uint8_t { kPlain, kDoublePage, kContext };

struct Background {
  cv::Mat raster;        // 8-bit BGR
  cv::Rect page_region;  // where the page itself sits inside `raster`
  BackgroundKind kind = BackgroundKind::kPlain;
};

/// Picks a pool background and applies at most one of the double-page
/// mirror or the context paste.
Background sample_background(const AssetStore& store, Rng& rng, const BackgroundConfig& cfg);

/// `[page | mirror(page)]`, so pixel(x, y) == pixel(2W-1-x, y).
cv::Mat make_double_page(const cv::Mat& page);

/// Pastes `page` fully inside `context` at a uniform offset, upscaling the
/// context when it is not at least `min_scale` times the page on both sides.
Background paste_on_context(const cv::Mat& page, const cv::Mat& context, Rng& rng, double min_scale = 1.15);

/// Draws a snippet: script by weight, then a uniform snippet of that script.
/// Throws NoSnippetForScript when a positively weighted script has none.
const TextSnippet& sample_text(const AssetStore& store, Rng& rng, const ScriptWeights& weights);

}  // namespace docsynth
