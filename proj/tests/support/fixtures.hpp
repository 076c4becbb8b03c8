#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "docsynth/assets.hpp"
#include "docsynth/config.hpp"
#include "docsynth/elements.hpp"

namespace docsynth::testing {

/// Scratch root inside the build tree.
std::filesystem::path tmp_root();

/// Empty directory `tmp_root()/name`, recreated on every call.
std::filesystem::path fresh_dir(const std::string& name);

/// Manifest of the shared demo asset tree, created on first use.
std::filesystem::path demo_manifest();

/// Process-wide store loaded from the demo assets.
const AssetStore& demo_store();

/// Default config pointing at the demo assets.
GenConfig demo_config();

/// Some text face from the demo pool, by file name.
const FontFace& demo_font(const std::string& file = "DejaVuSans.ttf");

std::string file_bytes(const std::filesystem::path& path);

/// Horizontal line with identity transform.
LineMetrics horizontal_line(int xheight_top, int baseline, int left, int right);

}  // namespace docsynth::testing
