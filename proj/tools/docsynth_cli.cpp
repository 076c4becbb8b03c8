// docsynth command line: dataset generation, inspection, post-processing,
// evaluation and demo assets.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <opencv2/imgproc.hpp>

#include "docsynth/demo_assets.hpp"
#include "docsynth/error.hpp"
#include "docsynth/generate.hpp"
#include "docsynth/image_io.hpp"
#include "docsynth/metrics.hpp"
#include "docsynth/postproc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace docsynth;

namespace {

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << j.dump(1) << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  return json::parse(in);
}

struct GenerateArgs {
  fs::path config;
  fs::path out;
  fs::path assets;
  std::optional<int> count;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

int run_generate(const GenerateArgs& a) {
  GenConfig cfg = a.config.empty() ? GenConfig{} : load_config(a.config);
  if (a.count) cfg.count = *a.count;
  if (a.seed) cfg.master_seed = *a.seed;
  if (a.workers) cfg.workers = *a.workers;
  if (!a.assets.empty()) cfg.assets = a.assets;
  cfg.validate();
  if (cfg.assets.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "no asset manifest: set \"assets\" in the config or pass --assets");
  }
  const AssetStore store = load_assets(AssetManifest::load(cfg.assets));
  generate_dataset(cfg, store, a.out);
  return 0;
}

// Accepts images/NNN.png, labels/NNN.png or meta/NNN.json of a dataset.
int run_inspect(const fs::path& sample, const fs::path& out_arg) {
  const fs::path root = sample.parent_path().parent_path();
  const std::string stem = sample.stem().string();
  const fs::path image_path = root / "images" / (stem + ".png");
  const fs::path label_path = root / "labels" / (stem + ".png");
  const fs::path meta_path = root / "meta" / (stem + ".json");
  const cv::Mat image = read_image(image_path);
  const cv::Mat labels = read_label_png(label_path);

  TaxonomyKind kind = TaxonomyKind::kCoarse;
  json meta;
  if (fs::exists(meta_path)) {
    meta = read_json(meta_path);
    if (const auto k = taxonomy_from_string(meta.value("taxonomy", "coarse"))) kind = *k;
  }
  cv::Mat colour = colorize_labels(labels, LabelTaxonomy::get(kind).palette());
  cv::Mat overlay = image.clone();
  if (meta.contains("baselines")) {
    for (const auto& line : read_baselines_json(meta)) {
      std::vector<cv::Point> pts;
      for (const auto& p : line) pts.emplace_back(cvRound(p.x), cvRound(p.y));
      cv::polylines(overlay, pts, false, cv::Scalar(0, 0, 255), 2, cv::LINE_AA);
      cv::polylines(colour, pts, false, cv::Scalar(255, 255, 255), 1, cv::LINE_8);
    }
  }
  cv::Mat side_by_side;
  cv::hconcat(overlay, colour, side_by_side);
  const fs::path out = out_arg.empty() ? root / "inspect" / (stem + ".png") : out_arg;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_png(out, side_by_side);
  std::cout << out.string() << '\n';
  return 0;
}

json baselines_json(const std::vector<Baseline>& baselines) {
  json out = json::array();
  for (const auto& b : baselines) {
    json line = json::array();
    for (const auto& p : b.polyline) line.push_back({std::round(p.x * 100) / 100, std::round(p.y * 100) / 100});
    out.push_back(line);
  }
  return out;
}

int run_postproc(const fs::path& labels, const fs::path& out, const std::string& taxonomy, const PostprocConfig& cfg) {
  std::vector<fs::path> files;
  if (fs::is_directory(labels)) {
    for (const auto& e : fs::directory_iterator(labels)) {
      if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(labels);
  }
  const auto kind = taxonomy_from_string(taxonomy);
  if (!kind) throw Error(ErrorCode::kInvalidConfig, "taxonomy must be 'fine' or 'coarse'");
  fs::create_directories(out);
  for (const auto& file : files) {
    const LabelMap map{read_label_png(file), *kind};
    const PageAnalysis page = analyze_page(map, cfg);
    json illus = json::array();
    for (const auto& r : page.illustrations) {
      json poly = json::array();
      for (const auto& p : r.contour) poly.push_back({p.x, p.y});
      illus.push_back({{"bbox", {r.bbox.x, r.bbox.y, r.bbox.width, r.bbox.height}},
                       {"area", r.component.area},
                       {"polygon", poly}});
    }
    write_json(out / (file.stem().string() + ".json"),
               {{"source", file.filename().string()},
                {"size", {map.width(), map.height()}},
                {"baselines", baselines_json(page.baselines)},
                {"illustrations", illus},
                {"components",
                 {{"text_found", page.text.found},
                  {"text_kept", page.text.kept},
                  {"text_too_narrow", page.too_narrow},
                  {"illustration_found", page.illustration.found},
                  {"illustration_kept", page.illustration.kept}}}});
  }
  spdlog::info("post-processed {} label maps into {}", files.size(), out.string());
  return 0;
}

int run_eval(const fs::path& pred, const fs::path& gt, const std::string& mode, const std::string& tolerance,
             const std::vector<int>& classes, const fs::path& report_path) {
  EvalOptions opt;
  if (mode == "seg") opt.mode = EvalMode::kSegmentation;
  else if (mode == "baseline") opt.mode = EvalMode::kBaseline;
  else throw Error(ErrorCode::kInvalidConfig, "--mode must be seg or baseline");
  if (tolerance != "auto") opt.tolerance = std::stod(tolerance);
  opt.classes = classes;
  const EvalReport report = evaluate_dataset(pred, gt, opt);
  write_json(report_path, to_json(report));
  if (opt.mode == EvalMode::kSegmentation) {
    std::cout << "mIoU " << report.miou << " over " << report.per_class_iou.size() << " classes, "
              << report.pages.size() << " pages (" << EvalReport::kAggregation << ")\n";
  } else {
    std::cout << EvalReport::kScheme << " P " << report.baseline.precision << " R " << report.baseline.recall << " F "
              << report.baseline.fvalue << " over " << report.pages.size() << " pages\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"docsynth: synthetic historical documents with line-level labels"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a dataset");
  generate->add_option("--config", gen.config, "JSON config file")->check(CLI::ExistingFile);
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_option("--assets", gen.assets, "Asset manifest, overriding the config")->check(CLI::ExistingFile);
  generate->add_option("--count", gen.count, "Number of samples")->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.seed, "Master seed");
  generate->add_option("--workers", gen.workers, "Worker threads")->check(CLI::PositiveNumber);

  fs::path sample, inspect_out;
  auto* inspect = app.add_subcommand("inspect", "Side-by-side image/label visualization of one sample");
  inspect->add_option("--sample", sample, "Sample image, label or meta path inside a dataset")->required();
  inspect->add_option("--out", inspect_out, "Output PNG (default <dataset>/inspect/<name>.png)");

  fs::path labels, pp_out;
  std::string pp_taxonomy = "coarse";
  PostprocConfig pp_cfg;
  auto* postproc = app.add_subcommand("postproc", "Components, baselines and illustration regions from label maps");
  postproc->add_option("--labels", labels, "Label PNG or directory of them")->required()->check(CLI::ExistingPath);
  postproc->add_option("--out", pp_out, "Output directory for per-page JSON")->required();
  postproc->add_option("--taxonomy", pp_taxonomy, "Label taxonomy of the maps")->check(CLI::IsMember({"coarse", "fine"}));
  postproc->add_option("--text-ratio", pp_cfg.text_ratio, "Minimum text component area / page area");
  postproc->add_option("--illustration-ratio", pp_cfg.illustration_ratio,
                       "Minimum illustration component area / page area");
  postproc->add_option("--min-width", pp_cfg.baseline.min_width, "Minimum component width for a baseline");

  fs::path pred, gt, report;
  std::string mode, tolerance = "auto";
  std::vector<int> classes;
  auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
  eval->add_option("--pred", pred, "Prediction directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--gt", gt, "Ground-truth directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--mode", mode, "seg or baseline")->required()->check(CLI::IsMember({"seg", "baseline"}));
  eval->add_option("--tolerance", tolerance, "Baseline tolerance in pixels, or auto");
  eval->add_option("--classes", classes, "Class indices scored in seg mode (default: all present)")->delimiter(',');
  eval->add_option("--report", report, "Report JSON path")->required();

  fs::path demo_out;
  DemoAssetOptions demo;
  auto* demo_cmd = app.add_subcommand("demo-assets", "Write a small procedural asset tree");
  demo_cmd->add_option("--out", demo_out, "Output directory")->required();
  demo_cmd->add_option("--seed", demo.seed, "Seed");

  auto* print_config = app.add_subcommand("print-config", "Print the default generator config");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*generate) return run_generate(gen);
    if (*inspect) return run_inspect(sample, inspect_out);
    if (*postproc) return run_postproc(labels, pp_out, pp_taxonomy, pp_cfg);
    if (*eval) return run_eval(pred, gt, mode, tolerance, classes, report);
    if (*demo_cmd) {
      std::cout << write_demo_assets(demo_out, demo).string() << '\n';
      return 0;
    }
    if (*print_config) {
      json j = to_json(GenConfig{});
      j.erase("assets");
      std::cout << j.dump(2) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    spdlog::error("{}: {}", to_string(e.code()), e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
