#include "docsynth/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <opencv2/imgproc.hpp>

#include "docsynth/elements.hpp"
#include "docsynth/error.hpp"

namespace docsynth {

void DegradeConfig::validate() const {
  for (double p : {p_blur, p_noise, p_bleed}) {
    if (p < 0.0 || p > 1.0) throw Error(ErrorCode::kInvalidConfig, "degradation probabilities must be in [0, 1]");
  }
  if (!(blur_sigma[0] > 0.0) || blur_sigma[1] < blur_sigma[0]) {
    throw Error(ErrorCode::kInvalidConfig, "blur_sigma range must be positive and ordered");
  }
  if (noise_shape_count[0] < 0 || noise_shape_count[1] < noise_shape_count[0]) {
    throw Error(ErrorCode::kInvalidConfig, "noise_shape_count range must be non-negative and ordered");
  }
  if (bleed_opacity[0] < 0.0 || bleed_opacity[1] < bleed_opacity[0] || bleed_opacity[1] > 1.0) {
    throw Error(ErrorCode::kInvalidConfig, "bleed_opacity range must lie in [0, 1] and be ordered");
  }
}

DegradePlan sample_degrade_plan(Rng& rng, const DegradeConfig& cfg) {
  // Every draw happens regardless of outcome so toggling one degradation
  // never shifts the randomness of another.
  DegradePlan plan;
  const bool bleed = rng.bernoulli(cfg.p_bleed);
  const double opacity = rng.uniform(cfg.bleed_opacity[0], cfg.bleed_opacity[1]);
  plan.verso_seed = rng.next_u64();
  const bool noise = rng.bernoulli(cfg.p_noise);
  const int shapes = rng.uniform_int(cfg.noise_shape_count[0], cfg.noise_shape_count[1]);
  plan.noise_seed = rng.next_u64();
  const bool blur = rng.bernoulli(cfg.p_blur);
  const double sigma = rng.uniform(cfg.blur_sigma[0], cfg.blur_sigma[1]);
  if (bleed) plan.bleed_opacity = opacity;
  if (noise) plan.noise_shapes = shapes;
  if (blur) plan.blur_sigma = sigma;
  return plan;
}

cv::Mat apply_blur(const cv::Mat& page, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidConfig, "blur sigma must be positive");
  cv::Mat out;
  const int k = 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1;
  cv::GaussianBlur(page, out, cv::Size(k, k), sigma, sigma, cv::BORDER_REFLECT);
  return out;
}

cv::Mat apply_structured_noise(const cv::Mat& page, Rng& rng, int shape_count) {
  cv::Mat out = page.clone();
  if (shape_count <= 0) return out;
  const int side = std::min(page.cols, page.rows);
  for (int i = 0; i < shape_count; ++i) {
    cv::Mat layer = out.clone();
    const cv::Point p(rng.uniform_int(0, page.cols - 1), rng.uniform_int(0, page.rows - 1));
    const double tone = rng.uniform(40, 140);
    const cv::Scalar ink(tone * rng.uniform(0.8, 1.0), tone * rng.uniform(0.8, 1.0), tone);
    const double alpha = rng.uniform(0.15, 0.4);
    const int kind = rng.uniform_int(0, 3);
    switch (kind) {
      case 0: {  // line
        const double len = rng.uniform(0.05, 0.3) * side;
        const double ang = rng.uniform(0, 2 * CV_PI);
        const cv::Point q(p.x + static_cast<int>(len * std::cos(ang)), p.y + static_cast<int>(len * std::sin(ang)));
        cv::line(layer, p, q, ink, rng.uniform_int(1, 3), cv::LINE_AA);
        break;
      }
      case 1: {  // arc
        const int r = static_cast<int>(rng.uniform(0.02, 0.12) * side);
        const double start = rng.uniform(0, 360);
        cv::ellipse(layer, p, {r, static_cast<int>(r * rng.uniform(0.5, 1.0))}, rng.uniform(0, 180), start,
                    start + rng.uniform(30, 200), ink, rng.uniform_int(1, 3), cv::LINE_AA);
        break;
      }
      case 2: {  // blob
        const int r = std::max(1, static_cast<int>(rng.uniform(0.003, 0.015) * side));
        cv::circle(layer, p, r, ink, cv::FILLED, cv::LINE_AA);
        break;
      }
      default: {  // stain: faint filled ellipse
        const int r = std::max(2, static_cast<int>(rng.uniform(0.01, 0.05) * side));
        cv::ellipse(layer, p, {r, static_cast<int>(r * rng.uniform(0.4, 1.0))}, rng.uniform(0, 180), 0, 360,
                    cv::Scalar(ink[0] + 60, ink[1] + 70, ink[2] + 80), cv::FILLED, cv::LINE_AA);
        break;
      }
    }
    cv::addWeighted(layer, alpha, out, 1.0 - alpha, 0.0, out);
  }
  return out;
}

cv::Mat apply_bleedthrough(const cv::Mat& page, const cv::Mat& verso_bgra, double opacity, bool mirror) {
  cv::Mat out = page.clone();
  if (opacity <= 0.0) return out;
  cv::Mat verso;
  if (mirror) {
    cv::flip(verso_bgra, verso, 1);
  } else {
    verso = verso_bgra;
  }
  blend_onto(out, verso, {0, 0}, opacity);
  return out;
}

}  // namespace docsynth
