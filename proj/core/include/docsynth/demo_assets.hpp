#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace docsynth {

struct DemoAssetOptions {
  std::uint64_t seed = 7;
  int backgrounds = 4;
  int context_images = 2;
  int images = 4;
  int drawing_sources = 4;
  /// Page background size in pixels (width, height).
  int page_width = 900;
  int page_height = 1240;
  /// Directories searched for the TrueType faces copied into the pools.
  std::vector<std::filesystem::path> font_dirs;
};

/// Font directories searched when DemoAssetOptions::font_dirs is empty.
std::vector<std::filesystem::path> default_font_dirs();

/// Writes a small, fully procedural asset tree (parchment backgrounds, desk
/// textures, coloured images, drawing sources, a three-script corpus and
/// copies of locally installed fonts) plus `assets.json`. Returns the path
/// of the manifest. Output is a pure function of the options and fonts.
std::filesystem::path write_demo_assets(const std::filesystem::path& dir, const DemoAssetOptions& options = {});

}  // namespace docsynth
