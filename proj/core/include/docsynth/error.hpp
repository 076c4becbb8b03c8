#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace docsynth {

enum class ErrorCode {
  kMissingPool,
  kFontParseError,
  kCorpusEmpty,
  kNoSnippetForScript,
  kInvalidBounds,
  kInvalidConfig,
  kTextDoesNotFit,
  kGlyphMissing,
  kDimensionMismatch,
  kUnpairedFile,
  kIoError,
  kFormatError,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; `code()` identifies the
// failure class so callers can recover selectively (e.g. skip a bad font).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace docsynth
