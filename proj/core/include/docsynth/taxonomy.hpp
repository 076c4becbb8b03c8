#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace docsynth {

/// Element classes the generator can place in a layout cell.
enum class ElementClass : std::uint8_t {
  kParagraph = 1,
  kTable,
  kTitle,
  kCaption,
  kFloatingWord,
  kImage,
  kDrawing,
  kGlyph,
};

inline constexpr std::array<ElementClass, 8> kAllElementClasses = {
    ElementClass::kParagraph, ElementClass::kTable,        ElementClass::kTitle,
    ElementClass::kCaption,   ElementClass::kFloatingWord, ElementClass::kImage,
    ElementClass::kDrawing,   ElementClass::kGlyph};

std::string_view to_string(ElementClass c);
std::optional<ElementClass> element_class_from_string(std::string_view name);
bool is_text_class(ElementClass c);
bool is_graphical_class(ElementClass c);

enum class TaxonomyKind : std::uint8_t { kFine, kCoarse };

std::string_view to_string(TaxonomyKind k);
std::optional<TaxonomyKind> taxonomy_from_string(std::string_view name);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Coarse indices. Fixed: downstream tools and the palette rely on them.
inline constexpr std::uint8_t kCoarseBackground = 0;
inline constexpr std::uint8_t kCoarseIllustration = 1;
inline constexpr std::uint8_t kCoarseText = 2;
inline constexpr std::uint8_t kCoarseBorder = 3;

// Fine indices: 0 is page background, 1..8 follow ElementClass, 9 is border.
inline constexpr std::uint8_t kFineBackground = 0;
inline constexpr std::uint8_t kFineBorder = 9;

/// Ordered class list, fine→coarse collapse and the PNG palette.
class LabelTaxonomy {
 public:
  static const LabelTaxonomy& fine();
  static const LabelTaxonomy& coarse();
  static const LabelTaxonomy& get(TaxonomyKind kind);

  TaxonomyKind kind() const { return kind_; }
  std::size_t class_count() const { return names_.size(); }
  const std::vector<std::string>& class_names() const { return names_; }
  const std::vector<Rgb>& palette() const { return palette_; }

  std::uint8_t index_of(ElementClass c) const;
  std::uint8_t border_index() const;
  std::uint8_t text_index_of(ElementClass c) const { return index_of(c); }

  /// Maps a fine index to its coarse index.
  static std::uint8_t fine_to_coarse(std::uint8_t fine_index);

 private:
  LabelTaxonomy(TaxonomyKind kind, std::vector<std::string> names, std::vector<Rgb> palette)
      : kind_(kind), names_(std::move(names)), palette_(std::move(palette)) {}

  TaxonomyKind kind_;
  std::vector<std::string> names_;
  std::vector<Rgb> palette_;
};

}  // namespace docsynth
