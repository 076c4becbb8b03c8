#include "docsynth/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace docsynth {

Affine identity_affine() { return Affine(1, 0, 0, 0, 1, 0); }

Affine translation(double dx, double dy) { return Affine(1, 0, dx, 0, 1, dy); }

Affine rotation_about(cv::Point2d center, double degrees) {
  // Same convention as cv::getRotationMatrix2D: positive angles rotate
  // counter-clockwise as displayed (y axis pointing down).
  const double rad = degrees * std::numbers::pi / 180.0;
  const double a = std::cos(rad);
  const double b = std::sin(rad);
  return Affine(a, b, (1 - a) * center.x - b * center.y,  //
                -b, a, b * center.x + (1 - a) * center.y);
}

Affine compose(const Affine& a, const Affine& b) {
  Affine r;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
    r(i, 2) = a(i, 0) * b(0, 2) + a(i, 1) * b(1, 2) + a(i, 2);
  }
  return r;
}

Affine invert(const Affine& a) {
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const double i00 = a(1, 1) / det, i01 = -a(0, 1) / det;
  const double i10 = -a(1, 0) / det, i11 = a(0, 0) / det;
  return Affine(i00, i01, -(i00 * a(0, 2) + i01 * a(1, 2)),  //
                i10, i11, -(i10 * a(0, 2) + i11 * a(1, 2)));
}

cv::Point2d apply(const Affine& a, cv::Point2d p) {
  return {a(0, 0) * p.x + a(0, 1) * p.y + a(0, 2), a(1, 0) * p.x + a(1, 1) * p.y + a(1, 2)};
}

std::vector<cv::Point2d> apply(const Affine& a, std::span<const cv::Point2d> pts) {
  std::vector<cv::Point2d> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(apply(a, p));
  return out;
}

std::vector<cv::Point2d> corners(const cv::Rect2d& r) {
  return {{r.x, r.y}, {r.x + r.width, r.y}, {r.x + r.width, r.y + r.height}, {r.x, r.y + r.height}};
}

void fill_polygon(cv::Mat& dst, std::span<const cv::Point2d> polygon, std::uint8_t value) {
  CV_Assert(dst.type() == CV_8UC1);
  if (polygon.size() < 3) return;
  double min_y = polygon[0].y, max_y = polygon[0].y;
  for (const auto& p : polygon) {
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const int y0 = std::max(0, static_cast<int>(std::ceil(min_y)));
  const int y1 = std::min(dst.rows - 1, static_cast<int>(std::floor(max_y)));
  std::vector<double> xs;
  for (int y = y0; y <= y1; ++y) {
    xs.clear();
    for (std::size_t i = 0; i < polygon.size(); ++i) {
      const auto& p = polygon[i];
      const auto& q = polygon[(i + 1) % polygon.size()];
      if (p.y == q.y) continue;
      const double lo = std::min(p.y, q.y), hi = std::max(p.y, q.y);
      // Half-open in y so shared vertices are counted once.
      if (y < lo || y >= hi) continue;
      xs.push_back(p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y));
    }
    std::sort(xs.begin(), xs.end());
    auto* row = dst.ptr<std::uint8_t>(y);
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int xa = std::max(0, static_cast<int>(std::ceil(xs[k])));
      const int xb = std::min(dst.cols - 1, static_cast<int>(std::floor(xs[k + 1])));
      for (int x = xa; x <= xb; ++x) row[x] = value;
    }
  }
}

cv::Mat polygon_mask(cv::Size size, std::span<const cv::Point2d> polygon) {
  cv::Mat mask = cv::Mat::zeros(size, CV_8UC1);
  fill_polygon(mask, polygon, 255);
  return mask;
}

bool point_in_polygon(std::span<const cv::Point2d> polygon, cv::Point2d p) {
  bool inside = false;
  for (std::size_t i = 0, j = polygon.size() - 1; i < polygon.size(); j = i++) {
    const auto& a = polygon[i];
    const auto& b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

double polyline_length(std::span<const cv::Point2d> polyline) {
  double total = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i) total += cv::norm(polyline[i] - polyline[i - 1]);
  return total;
}

std::vector<cv::Point2d> resample_polyline(std::span<const cv::Point2d> polyline, double step) {
  std::vector<cv::Point2d> out;
  if (polyline.empty()) return out;
  out.push_back(polyline.front());
  double carry = 0.0;  // arc length already travelled since the last emitted point
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const cv::Point2d a = polyline[i - 1];
    const cv::Point2d b = polyline[i];
    const double seg = cv::norm(b - a);
    if (seg <= 0.0) continue;
    double t = step - carry;
    while (t <= seg) {
      out.push_back(a + (b - a) * (t / seg));
      t += step;
    }
    carry = seg - (t - step);
  }
  if (cv::norm(out.back() - polyline.back()) > 1e-9) out.push_back(polyline.back());
  return out;
}

double distance_to_polyline(cv::Point2d p, std::span<const cv::Point2d> polyline) {
  if (polyline.empty()) return std::numeric_limits<double>::infinity();
  if (polyline.size() == 1) return cv::norm(p - polyline[0]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const cv::Point2d a = polyline[i - 1];
    const cv::Point2d d = polyline[i] - a;
    const double len2 = d.dot(d);
    double t = len2 > 0.0 ? (p - a).dot(d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, cv::norm(p - (a + d * t)));
  }
  return best;
}

}  // namespace docsynth
