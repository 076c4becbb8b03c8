#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "docsynth/config.hpp"
#include "docsynth/degrade.hpp"
#include "docsynth/labels.hpp"

namespace docsynth {

struct DroppedElement {
  ElementClass element_class = ElementClass::kParagraph;
  cv::Rect content;
  std::string reason;
};

struct DocumentSample {
  std::uint64_t seed = 0;
  cv::Mat image;  // 8-bit BGR
  LabelMap label_map;
  std::vector<RenderedElement> elements;  // page placements, in draw order
  std::vector<DroppedElement> dropped;
  Background background;
  DegradePlan degradations;
  std::string config_hash;

  /// Per-sample JSON: elements, lines (baseline, x-height band, bbox),
  /// seed, config hash, taxonomy and applied degradations.
  nlohmann::json manifest() const;
};

/// Background, layout, elements, labels, then degradations on the raster
/// only. Fully determined by (cfg, store, seed).
DocumentSample generate_sample(const GenConfig& cfg, const AssetStore& store, std::uint64_t seed);

/// Element grid of a verso page on a transparent BGRA canvas of `size`.
cv::Mat render_verso(const GenConfig& cfg, const AssetStore& store, std::uint64_t seed, cv::Size size);

struct SampleEntry {
  int index = 0;
  std::uint64_t seed = 0;
  std::string image;
  std::string label;
  std::string meta;
  std::string image_hash;  // FNV-1a 64 of the file bytes
  std::string label_hash;
};

struct DatasetManifest {
  std::vector<SampleEntry> samples;
  std::string config_hash;
  nlohmann::json to_json(const GenConfig& cfg) const;
};

std::string sample_stem(int index);

/// Writes images/, labels/, meta/, then split.json and manifest.json. Samples
/// are spread over `cfg.workers` threads; the output does not depend on the
/// worker count. An IoError aborts after the running samples finish and
/// reports how many were written.
DatasetManifest generate_dataset(const GenConfig& cfg, const AssetStore& store, const std::filesystem::path& out_dir);

/// Train/validation split of `count` indices, shuffled by `seed`.
std::pair<std::vector<int>, std::vector<int>> split_indices(int count, double train_fraction, std::uint64_t seed);

}  // namespace docsynth
