#pragma once

#include <opencv2/core.hpp>

#include <span>
#include <vector>

namespace docsynth {

/// 2x3 affine transform mapping (x, y, 1) to (x', y').
using Affine = cv::Matx23d;

Affine identity_affine();
Affine translation(double dx, double dy);
/// Rotation by `degrees` (counter-clockwise on screen, y pointing down)
/// about `center`.
Affine rotation_about(cv::Point2d center, double degrees);
/// a ∘ b: apply b first, then a.
Affine compose(const Affine& a, const Affine& b);
Affine invert(const Affine& a);
cv::Point2d apply(const Affine& a, cv::Point2d p);
std::vector<cv::Point2d> apply(const Affine& a, std::span<const cv::Point2d> pts);

/// Rectangle corners in order TL, TR, BR, BL.
std::vector<cv::Point2d> corners(const cv::Rect2d& r);

/// Sets `value` on every pixel of `dst` (CV_8UC1) whose centre (x, y) lies in
/// the polygon. Pixel (x, y) has its centre at integer coordinates, so the
/// polygon of rectangle rows [t, b] x cols [l, r] is (l-0.5, t-0.5)..(r+0.5, b+0.5).
void fill_polygon(cv::Mat& dst, std::span<const cv::Point2d> polygon, std::uint8_t value);

/// Fresh CV_8UC1 mask of `size` with the polygon set to 255.
cv::Mat polygon_mask(cv::Size size, std::span<const cv::Point2d> polygon);

bool point_in_polygon(std::span<const cv::Point2d> polygon, cv::Point2d p);

/// Resamples a polyline at unit arc-length steps (both endpoints kept).
std::vector<cv::Point2d> resample_polyline(std::span<const cv::Point2d> polyline, double step = 1.0);

double polyline_length(std::span<const cv::Point2d> polyline);

/// Euclidean distance from `p` to the closest point of a polyline.
double distance_to_polyline(cv::Point2d p, std::span<const cv::Point2d> polyline);

}  // namespace docsynth
