#pragma once

#include <opencv2/core.hpp>

#include <filesystem>
#include <span>

#include "docsynth/taxonomy.hpp"

namespace docsynth {

/// Reads a colour image as 8-bit BGR. Throws Error(kIoError) on failure.
cv::Mat read_image(const std::filesystem::path& path);

/// Writes an 8-bit BGR/BGRA/gray image as PNG with fixed compression settings
/// so repeated writes of equal rasters are byte-identical.
void write_png(const std::filesystem::path& path, const cv::Mat& image);

/// Writes a CV_8UC1 class-index raster as a palette-indexed PNG.
void write_label_png(const std::filesystem::path& path, const cv::Mat& labels,
                     std::span<const Rgb> palette);

/// Reads a label PNG back into a CV_8UC1 class-index raster. Palette PNGs
/// yield their raw indices; plain 8-bit grayscale PNGs are read as indices.
cv::Mat read_label_png(const std::filesystem::path& path);

/// Colourises a label raster with a palette (BGR output), for inspection.
cv::Mat colorize_labels(const cv::Mat& labels, std::span<const Rgb> palette);

}  // namespace docsynth
