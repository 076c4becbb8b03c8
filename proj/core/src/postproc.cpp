#include "docsynth/postproc.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <map>
#include <numeric>
#include <opencv2/imgproc.hpp>
#include <unordered_map>

namespace docsynth {

cv::Mat ConnectedComponent::mask() const {
  cv::Mat m = cv::Mat::zeros(bbox.size(), CV_8UC1);
  for (const Run& r : runs) {
    m.row(r.y - bbox.y).colRange(r.x_begin - bbox.x, r.x_end - bbox.x + 1).setTo(255);
  }
  return m;
}

std::vector<cv::Point> ConnectedComponent::pixels() const {
  std::vector<cv::Point> out;
  out.reserve(static_cast<std::size_t>(area));
  for (const Run& r : runs) {
    for (int x = r.x_begin; x <= r.x_end; ++x) out.emplace_back(x, r.y);
  }
  return out;
}

namespace {

class DisjointSet {
 public:
  int add() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }
  int find(int i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Smaller index stays root so roots follow raster order.
    if (a < b) parent_[b] = a;
    else parent_[a] = b;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

std::vector<ConnectedComponent> connected_components(const cv::Mat& mask, std::uint8_t class_index) {
  CV_Assert(mask.type() == CV_8UC1);
  std::vector<Run> runs;
  DisjointSet sets;
  std::size_t prev_begin = 0, prev_end = 0;
  for (int y = 0; y < mask.rows; ++y) {
    const std::uint8_t* row = mask.ptr<std::uint8_t>(y);
    const std::size_t row_begin = runs.size();
    for (int x = 0; x < mask.cols;) {
      if (!row[x]) {
        ++x;
        continue;
      }
      const int start = x;
      while (x < mask.cols && row[x]) ++x;
      const Run run{y, start, x - 1};
      const int id = sets.add();
      runs.push_back(run);
      for (std::size_t j = prev_begin; j < prev_end; ++j) {
        const Run& above = runs[j];
        if (above.x_begin > run.x_end + 1) break;
        if (above.x_end >= run.x_begin - 1) sets.unite(id, static_cast<int>(j));
      }
    }
    prev_begin = row_begin;
    prev_end = runs.size();
  }

  std::vector<ConnectedComponent> out;
  std::unordered_map<int, std::size_t> slot;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const int root = sets.find(static_cast<int>(i));
    auto [it, inserted] = slot.try_emplace(root, out.size());
    if (inserted) out.push_back({class_index, {}, {}, 0});
    out[it->second].runs.push_back(runs[i]);
  }
  for (auto& c : out) {
    int x0 = INT32_MAX, x1 = INT32_MIN;
    for (const Run& r : c.runs) {
      x0 = std::min(x0, r.x_begin);
      x1 = std::max(x1, r.x_end);
      c.area += r.length();
    }
    const int y0 = c.runs.front().y;
    const int y1 = c.runs.back().y;
    c.bbox = cv::Rect(x0, y0, x1 - x0 + 1, y1 - y0 + 1);
  }
  return out;
}

std::vector<ConnectedComponent> connected_components(const LabelMap& map, std::uint8_t class_index) {
  cv::Mat mask = map.data == class_index;
  return connected_components(mask, class_index);
}

cv::Mat component_id_image(std::span<const ConnectedComponent> components, cv::Size size) {
  cv::Mat ids = cv::Mat::zeros(size, CV_32SC1);
  for (std::size_t i = 0; i < components.size(); ++i) {
    for (const Run& r : components[i].runs) {
      ids.row(r.y).colRange(r.x_begin, r.x_end + 1).setTo(static_cast<int>(i + 1));
    }
  }
  return ids;
}

std::vector<ConnectedComponent> filter_components(std::span<const ConnectedComponent> components,
                                                  const AreaThresholds& thresholds, std::int64_t page_area) {
  std::vector<ConnectedComponent> out;
  for (const auto& c : components) {
    const auto it = thresholds.find(c.class_index);
    const double ratio = it == thresholds.end() ? 0.0 : it->second;
    if (static_cast<double>(c.area) >= ratio * static_cast<double>(page_area)) out.push_back(c);
  }
  return out;
}

double Baseline::evaluate(double u) const {
  const double t = (u - u_center) / u_scale;
  double v = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) v = v * t + *it;
  return v;
}

cv::Point2d Baseline::to_page(double u, double v) const {
  const double c = std::cos(theta), s = std::sin(theta);
  return {origin.x + u * c - v * s, origin.y + u * s + v * c};
}

cv::Point2d Baseline::to_frame(cv::Point2d p) const {
  const double c = std::cos(theta), s = std::sin(theta);
  const cv::Point2d d = p - origin;
  return {d.x * c + d.y * s, -d.x * s + d.y * c};
}

double principal_orientation(std::span<const cv::Point> pixels, cv::Point2d* mean) {
  double mx = 0, my = 0;
  for (const auto& p : pixels) {
    mx += p.x;
    my += p.y;
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, pixels.size()));
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (const auto& p : pixels) {
    const double dx = p.x - mx, dy = p.y - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (mean) *mean = {mx, my};
  return 0.5 * std::atan2(2.0 * sxy, sxx - syy);
}

std::optional<Baseline> extract_baseline(const ConnectedComponent& component, const BaselineConfig& cfg) {
  const auto pixels = component.pixels();
  if (pixels.empty()) return std::nullopt;
  Baseline b;
  b.theta = principal_orientation(pixels, &b.origin);

  // Bottom-most and top-most pixel centre per 1-px bin of the aligned frame.
  std::map<long, std::pair<double, double>> bins;
  b.u_min = std::numeric_limits<double>::infinity();
  b.u_max = -b.u_min;
  for (const auto& p : pixels) {
    const cv::Point2d uv = b.to_frame(cv::Point2d(p));
    b.u_min = std::min(b.u_min, uv.x);
    b.u_max = std::max(b.u_max, uv.x);
    const long bin = std::lround(uv.x);
    auto [it, inserted] = bins.try_emplace(bin, uv.y, uv.y);
    if (!inserted) {
      it->second.first = std::min(it->second.first, uv.y);
      it->second.second = std::max(it->second.second, uv.y);
    }
  }
  if (b.u_max - b.u_min + 1 < cfg.min_width) return std::nullopt;

  // End bins that only clip a corner of the component are left out of the fit.
  std::vector<double> extents;
  for (const auto& [bin, span] : bins) extents.push_back(span.second - span.first);
  std::nth_element(extents.begin(), extents.begin() + extents.size() / 2, extents.end());
  const double partial = 0.5 * extents[extents.size() / 2];
  auto first = bins.begin();
  auto last = std::prev(bins.end());
  while (first != last && first->second.second - first->second.first < partial) ++first;
  while (last != first && last->second.second - last->second.first < partial) --last;
  std::vector<std::pair<double, double>> samples;
  for (auto it = first;; ++it) {
    samples.emplace_back(static_cast<double>(it->first), it->second.second);
    if (it == last) break;
  }

  b.u_center = 0.5 * (b.u_min + b.u_max);
  b.u_scale = 0.5 * (b.u_max - b.u_min);
  const int n = static_cast<int>(samples.size());
  const int degree = std::min(cfg.max_degree, n - 1);
  Eigen::MatrixXd a(n, degree + 1);
  Eigen::VectorXd rhs(n);
  int row = 0;
  for (const auto& [u, v] : samples) {
    const double t = (u - b.u_center) / b.u_scale;
    double power = 1.0;
    for (int k = 0; k <= degree; ++k) {
      a(row, k) = power;
      power *= t;
    }
    rhs(row) = v;
    ++row;
  }
  const Eigen::VectorXd coeffs = a.colPivHouseholderQr().solve(rhs);
  b.coefficients.assign(coeffs.data(), coeffs.data() + coeffs.size());

  for (double u = b.u_min; u < b.u_max; u += 1.0) b.polyline.push_back(b.to_page(u, b.evaluate(u)));
  b.polyline.push_back(b.to_page(b.u_max, b.evaluate(b.u_max)));
  return b;
}

cv::Mat contour_mask(std::span<const cv::Point> contour, cv::Size size) {
  cv::Mat mask = cv::Mat::zeros(size, CV_8UC1);
  if (contour.empty()) return mask;
  const std::vector<std::vector<cv::Point>> polys{{contour.begin(), contour.end()}};
  cv::fillPoly(mask, polys, cv::Scalar(255), cv::LINE_8);
  cv::polylines(mask, polys, true, cv::Scalar(255), 1, cv::LINE_8);
  return mask;
}

std::vector<IllustrationRegion> extract_illustrations(const LabelMap& map, std::uint8_t illustration_index,
                                                      double area_ratio) {
  const auto found = connected_components(map, illustration_index);
  const auto kept = filter_components(found, {{illustration_index, area_ratio}},
                                     static_cast<std::int64_t>(map.width()) * map.height());
  std::vector<IllustrationRegion> out;
  for (const auto& c : kept) {
    cv::Mat m;
    cv::copyMakeBorder(c.mask(), m, 1, 1, 1, 1, cv::BORDER_CONSTANT, cv::Scalar(0));
    std::vector<std::vector<cv::Point>> contours;
    cv::findContours(m, contours, cv::RETR_EXTERNAL, cv::CHAIN_APPROX_SIMPLE);
    IllustrationRegion region{c, c.bbox, {}};
    if (!contours.empty()) {
      const auto largest = std::max_element(contours.begin(), contours.end(), [](const auto& l, const auto& r) {
        return cv::contourArea(l) < cv::contourArea(r);
      });
      for (const auto& p : *largest) region.contour.push_back(p + c.bbox.tl() - cv::Point(1, 1));
    }
    out.push_back(std::move(region));
  }
  return out;
}

PageAnalysis analyze_page(const LabelMap& map, const PostprocConfig& cfg) {
  const LabelMap coarse = collapse_to_coarse(map);
  const std::int64_t page_area = static_cast<std::int64_t>(coarse.width()) * coarse.height();
  PageAnalysis out;

  const auto text = connected_components(coarse, kCoarseText);
  const auto kept = filter_components(text, {{kCoarseText, cfg.text_ratio}}, page_area);
  out.text = {static_cast<int>(text.size()), static_cast<int>(kept.size())};
  for (const auto& c : kept) {
    if (auto b = extract_baseline(c, cfg.baseline)) out.baselines.push_back(std::move(*b));
    else ++out.too_narrow;
  }

  out.illustration.found = static_cast<int>(connected_components(coarse, kCoarseIllustration).size());
  out.illustrations = extract_illustrations(coarse, kCoarseIllustration, cfg.illustration_ratio);
  out.illustration.kept = static_cast<int>(out.illustrations.size());
  return out;
}

}  // namespace docsynth
