#include "docsynth/demo_assets.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <cmath>
#include <fstream>
#include <opencv2/imgproc.hpp>

#include "docsynth/error.hpp"
#include "docsynth/image_io.hpp"
#include "docsynth/rng.hpp"

namespace docsynth {

namespace fs = std::filesystem;

namespace {

constexpr const char* kLatin = R"(Gallia est omnis divisa in partes tres, quarum unam incolunt Belgae, aliam Aquitani, tertiam qui ipsorum lingua Celtae, nostra Galli appellantur. Hi omnes lingua, institutis, legibus inter se differunt.

Gallos ab Aquitanis Garumna flumen, a Belgis Matrona et Sequana dividit. Horum omnium fortissimi sunt Belgae, propterea quod a cultu atque humanitate provinciae longissime absunt.

Arma virumque cano, Troiae qui primus ab oris Italiam, fato profugus, Laviniaque venit litora, multum ille et terris iactatus et alto vi superum saevae memorem Iunonis ob iram.

Quousque tandem abutere, Catilina, patientia nostra? Quam diu etiam furor iste tuus nos eludet? Quem ad finem sese effrenata iactabit audacia?

In principio erat verbum, et verbum erat apud deum. Hoc erat in principio apud deum. Omnia per ipsum facta sunt, et sine ipso factum est nihil quod factum est.

Item de hortis et vineis et pratis que sunt iuxta fluvium, et de molendino quod est in villa, et de decimis que ad ecclesiam pertinent, sicut in carta continetur.

Liber primus de natura rerum. Capitulum secundum de elementis mundi et de ordine eorum, et quomodo terra in medio posita sit, et aqua circumfusa.

Anno domini millesimo ducentesimo, mense martii, ego frater Iohannes huius libri scriptor hanc tabulam feci ut lector facilius inveniat quod querit.
)";

constexpr const char* kArabic = R"(كان في قديم الزمان ملك عادل يحكم مدينة كبيرة على ضفاف النهر، وكان الناس يحبونه لحكمته وكرمه.

العلم نور والجهل ظلام، ومن طلب العلا سهر الليالي، ومن جد وجد ومن زرع حصد.

هذا كتاب في علم الفلك يذكر فيه المؤلف حركات الكواكب ومنازل القمر وأوقات الكسوف والخسوف.

الباب الأول في معرفة الأيام والشهور، والباب الثاني في معرفة السنين وما يتعلق بها من الحساب.
)";

constexpr const char* kChinese = R"(道可道，非常道。名可名，非常名。無名天地之始；有名萬物之母。

學而時習之，不亦說乎？有朋自遠方來，不亦樂乎？人不知而不慍，不亦君子乎？

天下皆知美之為美，斯惡已。皆知善之為善，斯不善已。故有無相生，難易相成。

上善若水。水善利萬物而不爭，處衆人之所惡，故幾於道。
)";

struct FontPick {
  const char* file;
  bool decorated;
};

constexpr FontPick kFonts[] = {
    {"DejaVuSans.ttf", false},        {"DejaVuSerif.ttf", false},        {"DejaVuSansMono.ttf", false},
    {"DejaVuSerif-Italic.ttf", false}, {"STIXGeneral.ttf", false},        {"STIXGeneralItalic.ttf", false},
    {"DejaVuSerif-Bold.ttf", true},   {"DejaVuSerif-BoldItalic.ttf", true}, {"STIXGeneralBol.ttf", true},
    {"DejaVuSans-Bold.ttf", true},
};

// Smooth random field in [-1, 1] built from a coarse grid of draws.
cv::Mat smooth_noise(Rng& rng, cv::Size size, int cells) {
  cv::Mat coarse(cells, cells, CV_32F);
  for (int y = 0; y < cells; ++y) {
    for (int x = 0; x < cells; ++x) coarse.at<float>(y, x) = static_cast<float>(rng.uniform(-1.0, 1.0));
  }
  cv::Mat field;
  cv::resize(coarse, field, size, 0, 0, cv::INTER_CUBIC);
  return field;
}

cv::Mat parchment(Rng& rng, cv::Size size) {
  const cv::Vec3f base(static_cast<float>(rng.uniform(165, 200)), static_cast<float>(rng.uniform(200, 228)),
                       static_cast<float>(rng.uniform(218, 240)));
  const cv::Mat broad = smooth_noise(rng, size, 6);
  const cv::Mat fine = smooth_noise(rng, size, 40);
  cv::Mat page(size, CV_32FC3);
  const cv::Point2f c(size.width / 2.0f, size.height / 2.0f);
  const float rmax = std::hypot(c.x, c.y);
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      const float r = std::hypot(x - c.x, y - c.y) / rmax;
      const float shade = 1.0f + 0.05f * broad.at<float>(y, x) + 0.02f * fine.at<float>(y, x) - 0.12f * r * r * r;
      page.at<cv::Vec3f>(y, x) = base * shade;
    }
  }
  const int stains = rng.uniform_int(1, 4);
  for (int i = 0; i < stains; ++i) {
    cv::Mat stain = cv::Mat::zeros(size, CV_32F);
    const cv::Point centre(rng.uniform_int(0, size.width - 1), rng.uniform_int(0, size.height - 1));
    const cv::Size axes(rng.uniform_int(20, size.width / 6), rng.uniform_int(20, size.height / 8));
    cv::ellipse(stain, centre, axes, rng.uniform(0, 180), 0, 360, cv::Scalar(1), cv::FILLED);
    cv::GaussianBlur(stain, stain, {0, 0}, 12);
    const float depth = static_cast<float>(rng.uniform(0.04, 0.12));
    for (int y = 0; y < size.height; ++y) {
      for (int x = 0; x < size.width; ++x) page.at<cv::Vec3f>(y, x) *= 1.0f - depth * stain.at<float>(y, x);
    }
  }
  cv::Mat out;
  page.convertTo(out, CV_8UC3);
  return out;
}

cv::Mat desk(Rng& rng, cv::Size size) {
  const cv::Vec3f base(static_cast<float>(rng.uniform(30, 70)), static_cast<float>(rng.uniform(50, 90)),
                       static_cast<float>(rng.uniform(80, 130)));
  const cv::Mat grain = smooth_noise(rng, {size.width / 8, size.height}, 24);
  cv::Mat stretched;
  cv::resize(grain, stretched, size, 0, 0, cv::INTER_LINEAR);
  cv::Mat out(size, CV_8UC3);
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      const float g = 1.0f + 0.25f * std::sin(8.0f * stretched.at<float>(y, x) + x * 0.02f);
      out.at<cv::Vec3b>(y, x) = cv::Vec3b(cv::saturate_cast<std::uint8_t>(base[0] * g),
                                          cv::saturate_cast<std::uint8_t>(base[1] * g),
                                          cv::saturate_cast<std::uint8_t>(base[2] * g));
    }
  }
  return out;
}

cv::Scalar random_colour(Rng& rng, int lo, int hi) {
  return cv::Scalar(rng.uniform_int(lo, hi), rng.uniform_int(lo, hi), rng.uniform_int(lo, hi));
}

cv::Mat picture(Rng& rng, cv::Size size) {
  cv::Mat img(size, CV_8UC3);
  const cv::Scalar top = random_colour(rng, 120, 250), bottom = random_colour(rng, 20, 160);
  for (int y = 0; y < size.height; ++y) {
    const double t = static_cast<double>(y) / std::max(1, size.height - 1);
    img.row(y).setTo(top * (1 - t) + bottom * t);
  }
  const int shapes = rng.uniform_int(4, 10);
  for (int i = 0; i < shapes; ++i) {
    const cv::Point c(rng.uniform_int(0, size.width - 1), rng.uniform_int(0, size.height - 1));
    const int r = rng.uniform_int(size.width / 16, size.width / 4);
    if (rng.bernoulli(0.5)) {
      cv::circle(img, c, r, random_colour(rng, 0, 255), cv::FILLED, cv::LINE_AA);
    } else {
      cv::rectangle(img, c, c + cv::Point(r, r * 2 / 3), random_colour(rng, 0, 255), cv::FILLED, cv::LINE_AA);
    }
  }
  cv::GaussianBlur(img, img, {0, 0}, 1.5);
  return img;
}

cv::Mat sketch_source(Rng& rng, cv::Size size) {
  cv::Mat img(size, CV_8UC3, cv::Scalar::all(235));
  const int shapes = rng.uniform_int(5, 12);
  for (int i = 0; i < shapes; ++i) {
    const cv::Point c(rng.uniform_int(0, size.width - 1), rng.uniform_int(0, size.height - 1));
    const cv::Size axes(rng.uniform_int(size.width / 20, size.width / 5), rng.uniform_int(size.height / 20, size.height / 5));
    const cv::Scalar shade = cv::Scalar::all(rng.uniform_int(30, 180));
    switch (rng.uniform_int(0, 2)) {
      case 0: cv::ellipse(img, c, axes, rng.uniform(0, 180), 0, 360, shade, cv::FILLED, cv::LINE_AA); break;
      case 1: cv::rectangle(img, c, c + cv::Point(axes.width, axes.height), shade, cv::FILLED, cv::LINE_AA); break;
      default: {
        std::vector<cv::Point> tri{c, c + cv::Point(axes.width, axes.height / 2), c + cv::Point(-axes.width / 2, axes.height)};
        cv::fillConvexPoly(img, tri, shade, cv::LINE_AA);
      }
    }
  }
  cv::GaussianBlur(img, img, {0, 0}, 2.0);
  return img;
}

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

std::optional<fs::path> find_font(const std::vector<fs::path>& dirs, const char* file) {
  for (const auto& d : dirs) {
    std::error_code ec;
    if (fs::is_regular_file(d / file, ec)) return d / file;
  }
  return std::nullopt;
}

}  // namespace

std::vector<fs::path> default_font_dirs() {
  std::vector<fs::path> dirs{"/usr/share/fonts/truetype/dejavu", "/usr/share/fonts/TTF", "/usr/share/fonts/dejavu"};
  for (const char* py : {"python3.12", "python3.11", "python3.10", "python3.9"}) {
    for (const char* site : {"/usr/local/lib/", "/usr/lib/"}) {
      for (const char* pkg : {"dist-packages", "site-packages"}) {
        dirs.push_back(fs::path(site) / py / pkg / "matplotlib/mpl-data/fonts/ttf");
      }
    }
  }
  return dirs;
}

fs::path write_demo_assets(const fs::path& dir, const DemoAssetOptions& options) {
  const std::vector<fs::path> font_dirs = options.font_dirs.empty() ? default_font_dirs() : options.font_dirs;
  for (const char* sub : {"backgrounds", "context", "fonts/text", "fonts/decorated", "images", "drawings", "corpus"}) {
    std::error_code ec;
    fs::create_directories(dir / sub, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create " + (dir / sub).string() + ": " + ec.message());
  }
  Rng rng(options.seed);
  const cv::Size page(options.page_width, options.page_height);
  auto name = [](const char* stem, int i) { return std::string(stem) + "_" + std::to_string(i) + ".png"; };
  for (int i = 0; i < options.backgrounds; ++i) write_png(dir / "backgrounds" / name("page", i), parchment(rng, page));
  for (int i = 0; i < options.context_images; ++i) {
    write_png(dir / "context" / name("desk", i), desk(rng, {page.width * 3 / 2, page.height * 5 / 4}));
  }
  for (int i = 0; i < options.images; ++i) {
    write_png(dir / "images" / name("picture", i), picture(rng, {rng.uniform_int(240, 480), rng.uniform_int(200, 420)}));
  }
  for (int i = 0; i < options.drawing_sources; ++i) {
    write_png(dir / "drawings" / name("sketch", i),
              sketch_source(rng, {rng.uniform_int(240, 480), rng.uniform_int(200, 420)}));
  }

  int text_fonts = 0, decorated_fonts = 0;
  for (const FontPick& pick : kFonts) {
    const auto src = find_font(font_dirs, pick.file);
    if (!src) continue;
    const fs::path dst = dir / (pick.decorated ? "fonts/decorated" : "fonts/text") / pick.file;
    std::error_code ec;
    fs::copy_file(*src, dst, fs::copy_options::overwrite_existing, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot copy font " + src->string() + ": " + ec.message());
    ++(pick.decorated ? decorated_fonts : text_fonts);
  }
  if (text_fonts == 0 || decorated_fonts == 0) {
    throw Error(ErrorCode::kMissingPool, "no usable TrueType fonts found in the searched font directories");
  }

  write_text(dir / "corpus" / "latin.txt", kLatin);
  write_text(dir / "corpus" / "arabic.txt", kArabic);
  write_text(dir / "corpus" / "chinese.txt", kChinese);

  const nlohmann::json manifest = {{"root", "."},
                                   {"backgrounds", "backgrounds"},
                                   {"context_images", "context"},
                                   {"text_fonts", "fonts/text"},
                                   {"decorated_fonts", "fonts/decorated"},
                                   {"images", "images"},
                                   {"drawing_sources", "drawings"},
                                   {"corpus", "corpus"}};
  const fs::path manifest_path = dir / "assets.json";
  write_text(manifest_path, manifest.dump(2) + "\n");
  spdlog::info("demo assets written to {} ({} text fonts, {} decorated fonts)", dir.string(), text_fonts,
               decorated_fonts);
  return manifest_path;
}

}  // namespace docsynth
