#include "docsynth/taxonomy.hpp"

#include "docsynth/error.hpp"

namespace docsynth {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingPool: return "MissingPool";
    case ErrorCode::kFontParseError: return "FontParseError";
    case ErrorCode::kCorpusEmpty: return "CorpusEmpty";
    case ErrorCode::kNoSnippetForScript: return "NoSnippetForScript";
    case ErrorCode::kInvalidBounds: return "InvalidBounds";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kTextDoesNotFit: return "TextDoesNotFit";
    case ErrorCode::kGlyphMissing: return "GlyphMissing";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kUnpairedFile: return "UnpairedFile";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kFormatError: return "FormatError";
  }
  return "Unknown";
}

std::string_view to_string(ElementClass c) {
  switch (c) {
    case ElementClass::kParagraph: return "paragraph";
    case ElementClass::kTable: return "table";
    case ElementClass::kTitle: return "title";
    case ElementClass::kCaption: return "caption";
    case ElementClass::kFloatingWord: return "floating_word";
    case ElementClass::kImage: return "image";
    case ElementClass::kDrawing: return "drawing";
    case ElementClass::kGlyph: return "glyph";
  }
  return "unknown";
}

std::optional<ElementClass> element_class_from_string(std::string_view name) {
  for (ElementClass c : kAllElementClasses) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

bool is_text_class(ElementClass c) {
  return c == ElementClass::kParagraph || c == ElementClass::kTable || c == ElementClass::kTitle ||
         c == ElementClass::kCaption || c == ElementClass::kFloatingWord;
}

bool is_graphical_class(ElementClass c) { return !is_text_class(c); }

std::string_view to_string(TaxonomyKind k) { return k == TaxonomyKind::kFine ? "fine" : "coarse"; }

std::optional<TaxonomyKind> taxonomy_from_string(std::string_view name) {
  if (name == "fine") return TaxonomyKind::kFine;
  if (name == "coarse") return TaxonomyKind::kCoarse;
  return std::nullopt;
}

const LabelTaxonomy& LabelTaxonomy::fine() {
  static const LabelTaxonomy taxonomy(
      TaxonomyKind::kFine,
      {"page_bkg", "paragraph", "table", "title", "caption", "floating_word", "image", "drawing",
       "glyph", "border"},
      {{0, 0, 0},
       {255, 255, 0},
       {128, 0, 128},
       {0, 0, 200},
       {255, 160, 0},
       {0, 200, 200},
       {0, 140, 0},
       {140, 70, 0},
       {200, 0, 0},
       {255, 0, 255}});
  return taxonomy;
}

const LabelTaxonomy& LabelTaxonomy::coarse() {
  static const LabelTaxonomy taxonomy(TaxonomyKind::kCoarse,
                                      {"background", "illustration", "text", "border"},
                                      {{0, 0, 0}, {0, 200, 0}, {255, 255, 0}, {255, 0, 255}});
  return taxonomy;
}

const LabelTaxonomy& LabelTaxonomy::get(TaxonomyKind kind) {
  return kind == TaxonomyKind::kFine ? fine() : coarse();
}

std::uint8_t LabelTaxonomy::index_of(ElementClass c) const {
  const auto fine_index = static_cast<std::uint8_t>(c);
  return kind_ == TaxonomyKind::kFine ? fine_index : fine_to_coarse(fine_index);
}

std::uint8_t LabelTaxonomy::border_index() const {
  return kind_ == TaxonomyKind::kFine ? kFineBorder : kCoarseBorder;
}

std::uint8_t LabelTaxonomy::fine_to_coarse(std::uint8_t fine_index) {
  if (fine_index == kFineBackground) return kCoarseBackground;
  if (fine_index == kFineBorder) return kCoarseBorder;
  const auto c = static_cast<ElementClass>(fine_index);
  return is_text_class(c) ? kCoarseText : kCoarseIllustration;
}

}  // namespace docsynth
