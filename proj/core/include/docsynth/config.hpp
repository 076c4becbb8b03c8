#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

#include "docsynth/assets.hpp"
#include "docsynth/degrade.hpp"
#include "docsynth/elements.hpp"
#include "docsynth/labels.hpp"
#include "docsynth/layout.hpp"
#include "docsynth/taxonomy.hpp"

namespace docsynth {

inline constexpr const char* kGeneratorVersion = "0.3.0";

struct SplitConfig {
  bool enabled = true;
  double train_fraction = 0.95;
};

/// Everything that determines a dataset. Serialized as JSON; every key is
/// optional and missing keys keep their defaults. Unknown keys are errors.
struct GenConfig {
  /// Longer page side in pixels, drawn uniformly per sample.
  cv::Vec2i page_long_side{1280, 1280};
  BackgroundConfig background;
  LayoutConfig layout;
  ElementConfig elements;
  DegradeConfig degrade;
  TextLabelMode text_mode;
  LabelConfig labels;
  TaxonomyKind taxonomy = TaxonomyKind::kCoarse;
  int count = 100;
  std::uint64_t master_seed = 0;
  int workers = 1;
  SplitConfig split;
  /// Asset manifest file; relative paths resolve against the config file.
  std::filesystem::path assets;

  void validate() const;
};

nlohmann::json to_json(const GenConfig& cfg);
/// Overlays `j` onto a default config. `base_dir` anchors relative paths.
GenConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
GenConfig load_config(const std::filesystem::path& file);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits. The run-specific
/// keys (count, workers, assets path) are excluded.
std::string config_hash(const GenConfig& cfg);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace docsynth
