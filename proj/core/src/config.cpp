#include "docsynth/config.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <set>

#include "docsynth/error.hpp"

namespace docsynth {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); }

json vec(const cv::Vec2d& v) { return json::array({v[0], v[1]}); }
json vec(const cv::Vec2i& v) { return json::array({v[0], v[1]}); }

/// Reads keys of one JSON object into existing fields, rejecting unknown keys.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) invalid(where_ + ": expected an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!used_.contains(key)) invalid(where_ + ": unknown key '" + key + "'");
    }
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    used_.insert(key);
    if (!j_.contains(key)) return;
    try {
      read(j_.at(key), out);
    } catch (const json::exception& e) {
      invalid(where_ + "." + key + ": " + e.what());
    }
  }

  const json* sub(const std::string& key) {
    used_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string path(const std::string& key) const { return where_ + "." + key; }

 private:
  static void read(const json& v, double& out) { out = v.get<double>(); }
  static void read(const json& v, int& out) { out = v.get<int>(); }
  static void read(const json& v, bool& out) { out = v.get<bool>(); }
  static void read(const json& v, std::uint64_t& out) { out = v.get<std::uint64_t>(); }
  static void read(const json& v, std::string& out) { out = v.get<std::string>(); }
  static void read(const json& v, cv::Vec2d& out) {
    if (!v.is_array() || v.size() != 2) invalid("expected a [lo, hi] pair, got " + v.dump());
    out = {v[0].get<double>(), v[1].get<double>()};
  }
  static void read(const json& v, cv::Vec2i& out) {
    if (!v.is_array() || v.size() != 2) invalid("expected a [lo, hi] pair, got " + v.dump());
    out = {v[0].get<int>(), v[1].get<int>()};
  }

  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

json class_weights_json(const ClassWeights& w) {
  json out = json::object();
  for (ElementClass c : kAllElementClasses) out[std::string(to_string(c))] = w[static_cast<std::size_t>(c) - 1];
  return out;
}

void read_class_weights(const json& j, const std::string& where, ClassWeights& w) {
  if (!j.is_object()) invalid(where + ": expected an object of class weights");
  for (const auto& [key, value] : j.items()) {
    const auto c = element_class_from_string(key);
    if (!c) invalid(where + ": unknown element class '" + key + "'");
    w[static_cast<std::size_t>(*c) - 1] = value.get<double>();
  }
}

json script_weights_json(const ScriptWeights& w) {
  json out = json::object();
  for (std::size_t i = 0; i < kScriptCount; ++i) out[std::string(to_string(static_cast<Script>(i)))] = w[i];
  return out;
}

void read_script_weights(const json& j, const std::string& where, ScriptWeights& w) {
  if (!j.is_object()) invalid(where + ": expected an object of script weights");
  for (const auto& [key, value] : j.items()) {
    const auto s = script_from_string(key);
    if (!s) invalid(where + ": unknown script '" + key + "'");
    w[static_cast<std::size_t>(*s)] = value.get<double>();
  }
}

void check_probability(double p, const std::string& name) {
  if (!(p >= 0.0 && p <= 1.0)) invalid(name + " must be in [0, 1]");
}

template <typename V>
void check_range(const V& v, double min, const std::string& name) {
  if (!(v[0] >= min && v[1] >= v[0])) invalid(name + " must be an ordered range with lower end >= " + std::to_string(min));
}

}  // namespace

void GenConfig::validate() const {
  check_range(page_long_side, 64, "page_long_side");
  background.validate();
  layout.validate();
  degrade.validate();
  const TextStyleConfig& t = elements.text;
  for (double p : t.script_weights) {
    if (p < 0.0) invalid("script weights must be non-negative");
  }
  for (auto [p, name] : {std::pair{t.p_rotate, "p_rotate"}, {t.p_strikethrough, "p_strikethrough"},
                         {t.p_underline, "p_underline"}, {t.p_bounding_box, "p_bounding_box"},
                         {t.p_justify, "p_justify"}, {t.p_center, "p_center"}, {t.p_right, "p_right"},
                         {elements.augment.p_blur, "augment.p_blur"}, {elements.augment.p_recolor, "augment.p_recolor"},
                         {elements.augment.p_opacity, "augment.p_opacity"}}) {
    check_probability(p, name);
  }
  if (t.p_justify + t.p_center + t.p_right > 1.0) invalid("alignment probabilities sum above 1");
  check_range(t.paragraph_px, 1, "paragraph_px");
  check_range(t.title_px, 1, "title_px");
  check_range(t.caption_px, 1, "caption_px");
  check_range(t.floating_word_px, 1, "floating_word_px");
  check_range(t.table_px, 1, "table_px");
  check_range(t.line_spacing, 0.3, "line_spacing");
  check_range(t.word_spacing, 0.0, "word_spacing");
  check_range(t.table_cols, 1, "table_cols");
  check_range(t.table_rows, 1, "table_rows");
  if (t.min_font_px < 1) invalid("min_font_px must be positive");
  if (t.max_rotation_deg < 0 || t.max_rotation_deg > 45) invalid("max_rotation_deg must be in [0, 45]");
  if (elements.drawing.blur_kernel < 1 || elements.drawing.blur_kernel % 2 == 0) invalid("drawing blur_kernel must be odd");
  check_range(elements.augment.blur_sigma, 0.01, "augment.blur_sigma");
  check_range(elements.augment.opacity, 0.0, "augment.opacity");
  if (elements.augment.opacity[1] > 1.0) invalid("augment.opacity must be within [0, 1]");
  if (labels.border_fraction < 0 || labels.border_min_px < 0) invalid("border settings must be non-negative");
  if (labels.baseline_thickness < 1) invalid("baseline_thickness must be positive");
  if (labels.closing_fraction < 0 || labels.closing_min_px < 0) invalid("closing settings must be non-negative");
  if (count < 1) invalid("count must be >= 1");
  if (workers < 1) invalid("workers must be >= 1");
  if (!(split.train_fraction > 0.0 && split.train_fraction <= 1.0)) invalid("split.train_fraction must be in (0, 1]");
}

json to_json(const GenConfig& c) {
  const TextStyleConfig& t = c.elements.text;
  const ElementAugmentConfig& a = c.elements.augment;
  const LayoutConfig& l = c.layout;
  return {
      {"page_long_side", vec(c.page_long_side)},
      {"background", {{"p_double", c.background.p_double}, {"p_context", c.background.p_context}}},
      {"layout",
       {{"rows", vec(cv::Vec2i(l.min_rows, l.max_rows))},
        {"cols", vec(cv::Vec2i(l.min_cols, l.max_cols))},
        {"jitter", l.jitter},
        {"page_margin", l.page_margin},
        {"p_empty", l.p_empty},
        {"p_caption", l.p_caption},
        {"margin", vec(cv::Vec2d(l.margin_min, l.margin_max))},
        {"min_content", l.min_content},
        {"class_weights", class_weights_json(l.class_weights)}}},
      {"text",
       {{"script_weights", script_weights_json(t.script_weights)},
        {"p_rotate", t.p_rotate},
        {"max_rotation_deg", t.max_rotation_deg},
        {"p_strikethrough", t.p_strikethrough},
        {"p_underline", t.p_underline},
        {"p_bounding_box", t.p_bounding_box},
        {"p_justify", t.p_justify},
        {"p_center", t.p_center},
        {"p_right", t.p_right},
        {"paragraph_px", vec(t.paragraph_px)},
        {"title_px", vec(t.title_px)},
        {"caption_px", vec(t.caption_px)},
        {"floating_word_px", vec(t.floating_word_px)},
        {"table_px", vec(t.table_px)},
        {"line_spacing", vec(t.line_spacing)},
        {"word_spacing", vec(t.word_spacing)},
        {"min_font_px", t.min_font_px},
        {"table_cols", vec(t.table_cols)},
        {"table_rows", vec(t.table_rows)}}},
      {"drawing",
       {{"blur_kernel", c.elements.drawing.blur_kernel}, {"ink_threshold", c.elements.drawing.ink_threshold}}},
      {"element_augment",
       {{"p_blur", a.p_blur},
        {"blur_sigma", vec(a.blur_sigma)},
        {"p_recolor", a.p_recolor},
        {"p_opacity", a.p_opacity},
        {"opacity", vec(a.opacity)}}},
      {"degrade",
       {{"p_blur", c.degrade.p_blur},
        {"blur_sigma", vec(c.degrade.blur_sigma)},
        {"p_noise", c.degrade.p_noise},
        {"noise_shape_count", vec(c.degrade.noise_shape_count)},
        {"p_bleed", c.degrade.p_bleed},
        {"bleed_opacity", vec(c.degrade.bleed_opacity)},
        {"mirror_verso", c.degrade.mirror_verso}}},
      {"text_mode",
       {{"representation", std::string(to_string(c.text_mode.representation))},
        {"with_border", c.text_mode.with_border}}},
      {"labels",
       {{"border_fraction", c.labels.border_fraction},
        {"border_min_px", c.labels.border_min_px},
        {"baseline_thickness", c.labels.baseline_thickness},
        {"closing_fraction", c.labels.closing_fraction},
        {"closing_min_px", c.labels.closing_min_px},
        {"border_on_illustrations", c.labels.border_on_illustrations}}},
      {"taxonomy", std::string(to_string(c.taxonomy))},
      {"count", c.count},
      {"master_seed", c.master_seed},
      {"workers", c.workers},
      {"split", {{"enabled", c.split.enabled}, {"train_fraction", c.split.train_fraction}}},
      {"assets", c.assets.generic_string()},
  };
}

GenConfig config_from_json(const json& j, const fs::path& base_dir) {
  GenConfig c;
  {
    Reader r(j, "config");
    r.get("page_long_side", c.page_long_side);
    if (const json* s = r.sub("background")) {
      Reader b(*s, "background");
      b.get("p_double", c.background.p_double);
      b.get("p_context", c.background.p_context);
    }
    if (const json* s = r.sub("layout")) {
      Reader b(*s, "layout");
      LayoutConfig& l = c.layout;
      cv::Vec2i rows{l.min_rows, l.max_rows}, cols{l.min_cols, l.max_cols};
      cv::Vec2d margin{l.margin_min, l.margin_max};
      b.get("rows", rows);
      b.get("cols", cols);
      b.get("margin", margin);
      l.min_rows = rows[0];
      l.max_rows = rows[1];
      l.min_cols = cols[0];
      l.max_cols = cols[1];
      l.margin_min = margin[0];
      l.margin_max = margin[1];
      b.get("jitter", l.jitter);
      b.get("page_margin", l.page_margin);
      b.get("p_empty", l.p_empty);
      b.get("p_caption", l.p_caption);
      b.get("min_content", l.min_content);
      if (const json* w = b.sub("class_weights")) read_class_weights(*w, b.path("class_weights"), l.class_weights);
    }
    if (const json* s = r.sub("text")) {
      Reader b(*s, "text");
      TextStyleConfig& t = c.elements.text;
      if (const json* w = b.sub("script_weights")) read_script_weights(*w, b.path("script_weights"), t.script_weights);
      b.get("p_rotate", t.p_rotate);
      b.get("max_rotation_deg", t.max_rotation_deg);
      b.get("p_strikethrough", t.p_strikethrough);
      b.get("p_underline", t.p_underline);
      b.get("p_bounding_box", t.p_bounding_box);
      b.get("p_justify", t.p_justify);
      b.get("p_center", t.p_center);
      b.get("p_right", t.p_right);
      b.get("paragraph_px", t.paragraph_px);
      b.get("title_px", t.title_px);
      b.get("caption_px", t.caption_px);
      b.get("floating_word_px", t.floating_word_px);
      b.get("table_px", t.table_px);
      b.get("line_spacing", t.line_spacing);
      b.get("word_spacing", t.word_spacing);
      b.get("min_font_px", t.min_font_px);
      b.get("table_cols", t.table_cols);
      b.get("table_rows", t.table_rows);
    }
    if (const json* s = r.sub("drawing")) {
      Reader b(*s, "drawing");
      b.get("blur_kernel", c.elements.drawing.blur_kernel);
      b.get("ink_threshold", c.elements.drawing.ink_threshold);
    }
    if (const json* s = r.sub("element_augment")) {
      Reader b(*s, "element_augment");
      ElementAugmentConfig& a = c.elements.augment;
      b.get("p_blur", a.p_blur);
      b.get("blur_sigma", a.blur_sigma);
      b.get("p_recolor", a.p_recolor);
      b.get("p_opacity", a.p_opacity);
      b.get("opacity", a.opacity);
    }
    if (const json* s = r.sub("degrade")) {
      Reader b(*s, "degrade");
      DegradeConfig& d = c.degrade;
      b.get("p_blur", d.p_blur);
      b.get("blur_sigma", d.blur_sigma);
      b.get("p_noise", d.p_noise);
      b.get("noise_shape_count", d.noise_shape_count);
      b.get("p_bleed", d.p_bleed);
      b.get("bleed_opacity", d.bleed_opacity);
      b.get("mirror_verso", d.mirror_verso);
    }
    if (const json* s = r.sub("text_mode")) {
      Reader b(*s, "text_mode");
      std::string rep(to_string(c.text_mode.representation));
      b.get("representation", rep);
      if (rep == "xheight") c.text_mode.representation = TextRepresentation::kXHeight;
      else if (rep == "baseline") c.text_mode.representation = TextRepresentation::kBaseline;
      else invalid("text_mode.representation must be 'xheight' or 'baseline'");
      b.get("with_border", c.text_mode.with_border);
    }
    if (const json* s = r.sub("labels")) {
      Reader b(*s, "labels");
      b.get("border_fraction", c.labels.border_fraction);
      b.get("border_min_px", c.labels.border_min_px);
      b.get("baseline_thickness", c.labels.baseline_thickness);
      b.get("closing_fraction", c.labels.closing_fraction);
      b.get("closing_min_px", c.labels.closing_min_px);
      b.get("border_on_illustrations", c.labels.border_on_illustrations);
    }
    std::string taxonomy(to_string(c.taxonomy));
    r.get("taxonomy", taxonomy);
    const auto kind = taxonomy_from_string(taxonomy);
    if (!kind) invalid("taxonomy must be 'fine' or 'coarse'");
    c.taxonomy = *kind;
    r.get("count", c.count);
    r.get("master_seed", c.master_seed);
    r.get("workers", c.workers);
    if (const json* s = r.sub("split")) {
      Reader b(*s, "split");
      b.get("enabled", c.split.enabled);
      b.get("train_fraction", c.split.train_fraction);
    }
    std::string assets;
    r.get("assets", assets);
    if (!assets.empty()) c.assets = fs::path(assets).is_absolute() ? fs::path(assets) : base_dir / assets;
  }
  c.validate();
  return c;
}

GenConfig load_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read config " + file.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, file.string() + ": " + e.what());
  }
  return config_from_json(j, file.parent_path());
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string config_hash(const GenConfig& cfg) {
  json j = to_json(cfg);
  j.erase("count");
  j.erase("workers");
  j.erase("assets");
  return hex64(fnv1a64(j.dump()));
}

}  // namespace docsynth
