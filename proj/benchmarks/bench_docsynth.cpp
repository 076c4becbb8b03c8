#include <benchmark/benchmark.h>

#include <cstdlib>
#include <filesystem>
#include <opencv2/imgproc.hpp>

#include "docsynth/demo_assets.hpp"
#include "docsynth/generate.hpp"
#include "docsynth/postproc.hpp"
#include "docsynth/rng.hpp"

namespace {

namespace fs = std::filesystem;
using namespace docsynth;

// Demo assets live next to the binary unless DOCSYNTH_BENCH_ASSETS points
// at an existing manifest.
const AssetStore& store() {
  static const AssetStore s = [] {
    fs::path manifest;
    if (const char* env = std::getenv("DOCSYNTH_BENCH_ASSETS")) {
      manifest = env;
    } else {
      const fs::path dir = fs::temp_directory_path() / "docsynth_bench_assets";
      manifest = dir / "assets.json";
      if (!fs::exists(manifest)) manifest = write_demo_assets(dir);
    }
    return load_assets(AssetManifest::load(manifest));
  }();
  return s;
}

void BM_GenerateSample(benchmark::State& state) {
  GenConfig cfg;
  cfg.page_long_side = {static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
  const AssetStore& s = store();
  std::uint64_t i = 0;
  for (auto _ : state) {
    DocumentSample sample = generate_sample(cfg, s, sample_seed(1, i++));
    benchmark::DoNotOptimize(sample.image.data);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GenerateSample)->Arg(640)->Arg(1280)->Unit(benchmark::kMillisecond);

void BM_ConnectedComponents(benchmark::State& state) {
  Rng rng(3);
  const int side = static_cast<int>(state.range(0));
  cv::Mat mask(side, side, CV_8UC1);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) mask.at<std::uint8_t>(y, x) = rng.bernoulli(0.45) ? 255 : 0;
  }
  for (auto _ : state) {
    auto comps = connected_components(mask);
    benchmark::DoNotOptimize(comps.data());
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_ConnectedComponents)->Arg(256)->Arg(1280)->Unit(benchmark::kMillisecond);

void BM_ExtractBaseline(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  cv::Mat band = cv::Mat::zeros(80, width + 20, CV_8UC1);
  for (int x = 10; x < width + 10; ++x) {
    const int bottom = 50 + static_cast<int>(std::lround(3.0 * std::sin(x / 30.0)));
    cv::line(band, {x, bottom - 12}, {x, bottom}, 255);
  }
  const auto comps = connected_components(band);
  for (auto _ : state) {
    auto b = extract_baseline(comps.front());
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(BM_ExtractBaseline)->Arg(200)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
