#include "docsynth/generate.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <opencv2/imgproc.hpp>
#include <sstream>
#include <thread>

#include "docsynth/error.hpp"
#include "docsynth/image_io.hpp"
#include "docsynth/layout.hpp"

namespace docsynth {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Background resize_background(Background bg, int long_side) {
  const int current = std::max(bg.raster.cols, bg.raster.rows);
  if (current == long_side) return bg;
  const double s = static_cast<double>(long_side) / current;
  const cv::Size size(std::max(1, static_cast<int>(std::lround(bg.raster.cols * s))),
                      std::max(1, static_cast<int>(std::lround(bg.raster.rows * s))));
  cv::Mat resized;
  cv::resize(bg.raster, resized, size, 0, 0, s < 1.0 ? cv::INTER_AREA : cv::INTER_LINEAR);
  bg.raster = resized;
  const cv::Rect& r = bg.page_region;
  const int x0 = static_cast<int>(std::lround(r.x * s)), y0 = static_cast<int>(std::lround(r.y * s));
  const int x1 = static_cast<int>(std::lround(r.br().x * s)), y1 = static_cast<int>(std::lround(r.br().y * s));
  bg.page_region = cv::Rect(x0, y0, x1 - x0, y1 - y0) & cv::Rect(0, 0, size.width, size.height);
  return bg;
}

// Renders every spec; failures are dropped and recorded.
std::vector<RenderedElement> render_all(const std::vector<ElementSpec>& specs, const AssetStore& store,
                                        const ElementConfig& cfg, std::vector<DroppedElement>* dropped) {
  std::vector<RenderedElement> out;
  for (const ElementSpec& spec : specs) {
    Rng rng(spec.seed);
    try {
      RenderedElement e = render_element(spec, store, rng, cfg);
      out.push_back(apply_element_augmentations(std::move(e), rng, cfg.augment));
    } catch (const Error& e) {
      spdlog::debug("dropped {} element: {}", to_string(spec.element_class), e.what());
      if (dropped) dropped->push_back({spec.element_class, spec.content, e.what()});
    } catch (const cv::Exception& e) {
      spdlog::debug("dropped {} element: {}", to_string(spec.element_class), e.what());
      if (dropped) dropped->push_back({spec.element_class, spec.content, e.what()});
    }
  }
  return out;
}

std::vector<ElementSpec> lay_out(cv::Size page, const cv::Rect& region, Rng& rng, const LayoutConfig& cfg) {
  const cv::Rect usable = usable_area(region, cfg.page_margin);
  if (usable.area() <= 0) return {};
  const GridLayout grid = sample_layout(page, usable, rng, cfg);
  return flatten(fill_layout(grid, rng, cfg));
}

double rounded(double v) { return std::round(v * 1000.0) / 1000.0; }

json points_json(std::span<const cv::Point2d> pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back({rounded(p.x), rounded(p.y)});
  return out;
}

json rect_json(const cv::Rect& r) { return {r.x, r.y, r.width, r.height}; }

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

cv::Mat render_verso(const GenConfig& cfg, const AssetStore& store, std::uint64_t seed, cv::Size size) {
  Rng rng(seed);
  const auto specs = lay_out(size, cv::Rect({0, 0}, size), rng, cfg.layout);
  const auto elements = render_all(specs, store, cfg.elements, nullptr);
  // Layout cells are disjoint, so the most opaque pixel wins without
  // needing a full over-operator.
  cv::Mat canvas = cv::Mat::zeros(size, CV_8UC4);
  const cv::Rect bounds({0, 0}, size);
  for (const auto& e : elements) {
    const cv::Rect target = e.page_rect() & bounds;
    for (int y = target.y; y < target.br().y; ++y) {
      auto* dst = canvas.ptr<cv::Vec4b>(y);
      const auto* src = e.raster.ptr<cv::Vec4b>(y - e.placement.y);
      for (int x = target.x; x < target.br().x; ++x) {
        const cv::Vec4b& s = src[x - e.placement.x];
        if (s[3] > dst[x][3]) dst[x] = s;
      }
    }
  }
  return canvas;
}

DocumentSample generate_sample(const GenConfig& cfg, const AssetStore& store, std::uint64_t seed) {
  DocumentSample sample;
  sample.seed = seed;
  sample.config_hash = config_hash(cfg);

  Rng rng(seed);
  Rng bg_rng = rng.split();
  Rng layout_rng = rng.split();
  Rng degrade_rng = rng.split();

  const int long_side = bg_rng.uniform_int(cfg.page_long_side[0], cfg.page_long_side[1]);
  sample.background = resize_background(sample_background(store, bg_rng, cfg.background), long_side);
  const cv::Size page = sample.background.raster.size();

  const auto specs = lay_out(page, sample.background.page_region, layout_rng, cfg.layout);
  sample.elements = render_all(specs, store, cfg.elements, &sample.dropped);

  sample.image = compose_page(sample.background.raster, sample.elements);
  sample.label_map = build_label_map(sample.elements, page, cfg.taxonomy, cfg.text_mode, cfg.labels);

  sample.degradations = sample_degrade_plan(degrade_rng, cfg.degrade);
  const DegradePlan& plan = sample.degradations;
  if (plan.bleed_opacity) {
    const cv::Mat verso = render_verso(cfg, store, plan.verso_seed, page);
    sample.image = apply_bleedthrough(sample.image, verso, *plan.bleed_opacity, cfg.degrade.mirror_verso);
  }
  if (plan.noise_shapes > 0) {
    Rng noise_rng(plan.noise_seed);
    sample.image = apply_structured_noise(sample.image, noise_rng, plan.noise_shapes);
  }
  if (plan.blur_sigma) sample.image = apply_blur(sample.image, *plan.blur_sigma);
  return sample;
}

json DocumentSample::manifest() const {
  json elements_json = json::array();
  for (const auto& e : elements) {
    json lines = json::array();
    for (const auto& l : page_lines(e)) {
      lines.push_back({{"baseline", points_json(baseline_segment(l))},
                       {"xheight_band", points_json(xheight_polygon(l))},
                       {"bbox", points_json(bbox_polygon(l))},
                       {"x_height", l.x_height()},
                       {"rotation_deg", rounded(l.rotation_deg)}});
    }
    const cv::Rect r = e.page_rect();
    elements_json.push_back({{"class", std::string(to_string(e.element_class))},
                             {"bbox", rect_json(r)},
                             {"polygon", json::array({{r.x, r.y},
                                                      {r.br().x - 1, r.y},
                                                      {r.br().x - 1, r.br().y - 1},
                                                      {r.x, r.br().y - 1}})},
                             {"rotation_deg", rounded(e.rotation_deg)},
                             {"lines", lines}});
  }
  json baselines = json::array();
  for (const auto& e : elements) {
    for (const auto& l : page_lines(e)) baselines.push_back(points_json(baseline_segment(l)));
  }
  json dropped_json = json::array();
  for (const auto& d : dropped) {
    dropped_json.push_back({{"class", std::string(to_string(d.element_class))},
                            {"bbox", rect_json(d.content)},
                            {"reason", d.reason}});
  }
  json degr = {{"bleed_opacity", degradations.bleed_opacity ? json(rounded(*degradations.bleed_opacity)) : json()},
               {"noise_shapes", degradations.noise_shapes},
               {"blur_sigma", degradations.blur_sigma ? json(rounded(*degradations.blur_sigma)) : json()}};
  static constexpr const char* kKinds[] = {"plain", "double_page", "context"};
  return {{"seed", seed},
          {"config_hash", config_hash},
          {"generator_version", kGeneratorVersion},
          {"taxonomy", std::string(to_string(label_map.taxonomy))},
          {"size", {image.cols, image.rows}},
          {"background", {{"kind", kKinds[static_cast<int>(background.kind)]},
                          {"page_region", rect_json(background.page_region)}}},
          {"elements", elements_json},
          {"baselines", baselines},
          {"dropped", dropped_json},
          {"degradations", degr}};
}

std::string sample_stem(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d", index);
  return buf;
}

std::pair<std::vector<int>, std::vector<int>> split_indices(int count, double train_fraction, std::uint64_t seed) {
  std::vector<int> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
  const auto n_train = static_cast<std::size_t>(std::lround(train_fraction * count));
  std::vector<int> train(order.begin(), order.begin() + static_cast<long>(n_train));
  std::vector<int> val(order.begin() + static_cast<long>(n_train), order.end());
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
  return {train, val};
}

json DatasetManifest::to_json(const GenConfig& cfg) const {
  const LabelTaxonomy& tax = LabelTaxonomy::get(cfg.taxonomy);
  json classes = json::array();
  for (std::size_t i = 0; i < tax.class_names().size(); ++i) {
    const Rgb c = tax.palette()[i];
    classes.push_back({{"index", i}, {"name", tax.class_names()[i]}, {"color", {c.r, c.g, c.b}}});
  }
  json snapshot = docsynth::to_json(cfg);
  snapshot.erase("workers");
  json list = json::array();
  for (const auto& s : samples) {
    list.push_back({{"index", s.index},
                    {"seed", s.seed},
                    {"image", s.image},
                    {"label", s.label},
                    {"meta", s.meta},
                    {"image_hash", s.image_hash},
                    {"label_hash", s.label_hash}});
  }
  return {{"generator", "docsynth"},
          {"generator_version", kGeneratorVersion},
          {"count", samples.size()},
          {"master_seed", cfg.master_seed},
          {"seed_derivation", "splitmix64(master_seed + index * 0x9e3779b97f4a7c15)"},
          {"config_hash", config_hash},
          {"config", snapshot},
          {"taxonomy", {{"name", std::string(to_string(cfg.taxonomy))}, {"classes", classes}}},
          {"text_mode",
           {{"representation", std::string(to_string(cfg.text_mode.representation))},
            {"with_border", cfg.text_mode.with_border}}},
          {"samples", list}};
}

DatasetManifest generate_dataset(const GenConfig& cfg, const AssetStore& store, const fs::path& out_dir) {
  cfg.validate();
  std::error_code ec;
  for (const char* sub : {"images", "labels", "meta"}) {
    fs::create_directories(out_dir / sub, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create " + (out_dir / sub).string() + ": " + ec.message());
  }
  const LabelTaxonomy& tax = LabelTaxonomy::get(cfg.taxonomy);

  DatasetManifest manifest;
  manifest.config_hash = config_hash(cfg);
  manifest.samples.resize(static_cast<std::size_t>(cfg.count));
  std::atomic<int> next{0};
  std::atomic<int> written{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::string first_error;

  auto work = [&] {
    for (;;) {
      if (failed.load()) return;
      const int i = next.fetch_add(1);
      if (i >= cfg.count) return;
      try {
        const std::uint64_t seed = sample_seed(cfg.master_seed, static_cast<std::uint64_t>(i));
        const DocumentSample sample = generate_sample(cfg, store, seed);
        const std::string stem = sample_stem(i);
        SampleEntry entry{i, seed, "images/" + stem + ".png", "labels/" + stem + ".png", "meta/" + stem + ".json", {}, {}};
        write_png(out_dir / entry.image, sample.image);
        write_label_png(out_dir / entry.label, sample.label_map.data, tax.palette());
        json meta = sample.manifest();
        meta["index"] = i;
        std::ofstream meta_out(out_dir / entry.meta);
        meta_out << meta.dump(1) << '\n';
        if (!meta_out) throw Error(ErrorCode::kIoError, "cannot write " + (out_dir / entry.meta).string());
        entry.image_hash = hex64(fnv1a64(read_bytes(out_dir / entry.image)));
        entry.label_hash = hex64(fnv1a64(read_bytes(out_dir / entry.label)));
        manifest.samples[static_cast<std::size_t>(i)] = std::move(entry);
        ++written;
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!failed.exchange(true)) first_error = "sample " + std::to_string(i) + ": " + e.what();
      }
    }
  };

  const int workers = std::min(cfg.workers, cfg.count);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failed) {
    throw Error(ErrorCode::kIoError, "dataset generation aborted after " + std::to_string(written.load()) + " of " +
                                         std::to_string(cfg.count) + " samples were written; " + first_error);
  }

  if (cfg.split.enabled) {
    const auto [train, val] = split_indices(cfg.count, cfg.split.train_fraction, splitmix64(cfg.master_seed ^ 0x5a17));
    std::ofstream split_out(out_dir / "split.json");
    split_out << json{{"train_fraction", cfg.split.train_fraction}, {"train", train}, {"val", val}}.dump(1) << '\n';
    if (!split_out) throw Error(ErrorCode::kIoError, "cannot write split.json");
  }
  std::ofstream out(out_dir / "manifest.json");
  out << manifest.to_json(cfg).dump(1) << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "cannot write manifest.json");
  spdlog::info("wrote {} samples to {}", cfg.count, out_dir.string());
  return manifest;
}

}  // namespace docsynth
