#include "docsynth/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <opencv2/imgcodecs.hpp>
#include <vector>

#include "docsynth/error.hpp"

namespace docsynth {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return f;
}

void png_warn(png_structp, png_const_charp) {}

}  // namespace

cv::Mat read_image(const std::filesystem::path& path) {
  cv::Mat img = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (img.empty()) throw Error(ErrorCode::kIoError, "cannot decode image " + path.string());
  return img;
}

void write_png(const std::filesystem::path& path, const cv::Mat& image) {
  const std::vector<int> params = {cv::IMWRITE_PNG_COMPRESSION, 6};
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), image, params);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

void write_label_png(const std::filesystem::path& path, const cv::Mat& labels,
                     std::span<const Rgb> palette) {
  CV_Assert(labels.type() == CV_8UC1);
  if (palette.empty() || palette.size() > 256) {
    throw Error(ErrorCode::kInvalidConfig, "palette must hold 1..256 colours");
  }
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warn);
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_write_struct(p, i); }
  } guard{&png, &info};

  std::vector<png_color> colors;
  colors.reserve(palette.size());
  for (const Rgb& c : palette) colors.push_back({c.r, c.g, c.b});
  // libpng reports errors by longjmp; only libpng frames are skipped.
  if (setjmp(png_jmpbuf(png))) throw Error(ErrorCode::kIoError, "libpng failed writing " + path.string());
  png_init_io(png, file.get());
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, static_cast<png_uint_32>(labels.cols), static_cast<png_uint_32>(labels.rows),
               8, PNG_COLOR_TYPE_PALETTE, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_PLTE(png, info, colors.data(), static_cast<int>(colors.size()));
  png_write_info(png, info);
  for (int y = 0; y < labels.rows; ++y) {
    png_write_row(png, labels.ptr<png_byte>(y));
  }
  png_write_end(png, nullptr);
}

cv::Mat read_label_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warn);
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_read_struct(p, i, nullptr); }
  } guard{&png, &info};

  cv::Mat labels;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) throw Error(ErrorCode::kIoError, "libpng failed reading " + path.string());
  png_init_io(png, file.get());
  png_read_info(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  if (color_type != PNG_COLOR_TYPE_PALETTE && color_type != PNG_COLOR_TYPE_GRAY) {
    throw Error(ErrorCode::kFormatError, path.string() + " is not an indexed or grayscale PNG");
  }
  if (bit_depth == 16) throw Error(ErrorCode::kFormatError, path.string() + " has 16-bit samples");
  if (bit_depth < 8) png_set_packing(png);
  png_read_update_info(png, info);

  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  labels.create(height, width, CV_8UC1);
  rows.resize(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) rows[static_cast<std::size_t>(y)] = labels.ptr<png_byte>(y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  return labels;
}

cv::Mat colorize_labels(const cv::Mat& labels, std::span<const Rgb> palette) {
  CV_Assert(labels.type() == CV_8UC1);
  cv::Mat out(labels.size(), CV_8UC3);
  for (int y = 0; y < labels.rows; ++y) {
    const auto* src = labels.ptr<std::uint8_t>(y);
    auto* dst = out.ptr<cv::Vec3b>(y);
    for (int x = 0; x < labels.cols; ++x) {
      const Rgb c = src[x] < palette.size() ? palette[src[x]] : Rgb{255, 255, 255};
      dst[x] = cv::Vec3b(c.b, c.g, c.r);
    }
  }
  return out;
}

}  // namespace docsynth
