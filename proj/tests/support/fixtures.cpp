#include "fixtures.hpp"

#include <unistd.h>

#include <fstream>
#include <mutex>
#include <sstream>

#include "docsynth/demo_assets.hpp"
#include "docsynth/error.hpp"

namespace docsynth::testing {

namespace fs = std::filesystem;

fs::path tmp_root() {
  const fs::path root(DOCSYNTH_TEST_TMP);
  fs::create_directories(root);
  return root;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = tmp_root() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path demo_manifest() {
  static std::once_flag once;
  static fs::path manifest;
  std::call_once(once, [] {
    const fs::path dir = tmp_root() / "demo_assets";
    manifest = dir / "assets.json";
    if (fs::exists(manifest)) return;
    // Build beside the target and rename, so concurrent test processes
    // never see a half-written tree.
    const fs::path staging = tmp_root() / ("demo_assets.staging." + std::to_string(::getpid()));
    fs::remove_all(staging);
    write_demo_assets(staging);
    std::error_code ec;
    fs::rename(staging, dir, ec);
    if (ec) fs::remove_all(staging);
    if (!fs::exists(manifest)) throw Error(ErrorCode::kIoError, "demo assets missing at " + dir.string());
  });
  return manifest;
}

const AssetStore& demo_store() {
  static const AssetStore store = load_assets(AssetManifest::load(demo_manifest()));
  return store;
}

GenConfig demo_config() {
  GenConfig cfg;
  cfg.assets = demo_manifest();
  return cfg;
}

const FontFace& demo_font(const std::string& file) {
  for (const auto& f : demo_store().text_fonts()) {
    if (f.path.filename() == file) return f;
  }
  for (const auto& f : demo_store().decorated_fonts()) {
    if (f.path.filename() == file) return f;
  }
  return demo_store().text_fonts().front();
}

std::string file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LineMetrics horizontal_line(int xheight_top, int baseline, int left, int right) {
  LineMetrics l;
  l.xheight_top_y = xheight_top;
  l.baseline_y = baseline;
  l.x_left = left;
  l.x_right = right;
  l.line_bbox = cv::Rect(left, xheight_top - 5, right - left + 1, baseline - xheight_top + 10);
  return l;
}

}  // namespace docsynth::testing
