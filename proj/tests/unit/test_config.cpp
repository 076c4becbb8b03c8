#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <fstream>

#include "docsynth/config.hpp"
#include "docsynth/error.hpp"
#include "fixtures.hpp"

using namespace docsynth;
using namespace docsynth::testing;
using nlohmann::json;

namespace {

ErrorCode code_of(const json& j) {
  try {
    config_from_json(j);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "accepted: " << j.dump();
  return ErrorCode::kIoError;
}

}  // namespace

TEST(Config, DefaultsValidate) { EXPECT_NO_THROW(GenConfig{}.validate()); }

TEST(Config, EmptyObjectGivesDefaults) { EXPECT_EQ(to_json(config_from_json(json::object())), to_json(GenConfig{})); }

TEST(Config, RoundTrip) {
  GenConfig c;
  c.page_long_side = {700, 900};
  c.layout.max_rows = 4;
  c.layout.class_weights[0] = 3.5;
  c.elements.text.p_rotate = 0.25;
  c.elements.text.script_weights = {1, 0, 0};
  c.degrade.p_bleed = 0.0;
  c.text_mode.representation = TextRepresentation::kBaseline;
  c.text_mode.with_border = false;
  c.taxonomy = TaxonomyKind::kFine;
  c.master_seed = 0xfeedfacecafebeefULL;
  c.count = 17;
  c.workers = 3;
  c.split.enabled = false;
  const json j = to_json(c);
  const GenConfig back = config_from_json(json::parse(j.dump()));
  EXPECT_EQ(to_json(back), j);
  EXPECT_EQ(back.master_seed, 0xfeedfacecafebeefULL);
  EXPECT_EQ(back.taxonomy, TaxonomyKind::kFine);
  EXPECT_EQ(config_hash(back), config_hash(c));
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_EQ(code_of({{"colour", 1}}), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of({{"layout", {{"rowz", json::array({1, 2})}}}}), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of({{"text", {{"script_weights", {{"klingon", 1}}}}}}), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of({{"layout", {{"class_weights", {{"poem", 1}}}}}}), ErrorCode::kInvalidConfig);
}

TEST(Config, BadValuesRejected) {
  EXPECT_EQ(code_of({{"count", 0}}), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of({{"workers", 0}}), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of({{"page_long_side", json::array({900, 800})}}), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of({{"page_long_side", json::array({900})}}), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of({{"degrade", {{"p_blur", 1.5}}}}), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of({{"text", {{"p_justify", 0.6}, {"p_center", 0.6}}}}), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of({{"text", {{"max_rotation_deg", 60}}}}), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of({{"taxonomy", "medium"}}), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of({{"text_mode", {{"representation", "ascender"}}}}), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of({{"count", "many"}}), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of({{"drawing", {{"blur_kernel", 4}}}}), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of({{"split", {{"train_fraction", 0.0}}}}), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of(json::array()), ErrorCode::kInvalidConfig);
}

TEST(Config, AssetsResolveAgainstConfigFile) {
  const auto dir = fresh_dir("config_paths");
  std::filesystem::create_directories(dir / "sub");
  std::ofstream(dir / "sub" / "gen.json") << R"({
    // comments are allowed
    "assets": "../assets/manifest.json", "count": 3
  })";
  const GenConfig c = load_config(dir / "sub" / "gen.json");
  EXPECT_EQ(c.assets.lexically_normal(), (dir / "assets" / "manifest.json").lexically_normal());
  EXPECT_EQ(c.count, 3);

  std::ofstream(dir / "abs.json") << json{{"assets", "/opt/assets.json"}}.dump();
  EXPECT_EQ(load_config(dir / "abs.json").assets, std::filesystem::path("/opt/assets.json"));
}

TEST(Config, LoadErrors) {
  const auto dir = fresh_dir("config_errors");
  try {
    load_config(dir / "missing.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
  std::ofstream(dir / "broken.json") << "{ \"count\": ";
  try {
    load_config(dir / "broken.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
  }
}

TEST(Config, HashIgnoresRunKeys) {
  GenConfig a;
  GenConfig b = a;
  b.count = 5000;
  b.workers = 8;
  b.assets = "/somewhere/else.json";
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.master_seed = 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  GenConfig c = a;
  c.text_mode.with_border = false;
  EXPECT_NE(config_hash(a), config_hash(c));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Config, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(hex64(0xaf63dc4c8601ec8cULL), "af63dc4c8601ec8c");
  EXPECT_EQ(hex64(1), "0000000000000001");
}
