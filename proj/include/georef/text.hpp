#pragma once

#include <string>
#include <string_view>

namespace georef {

std::u32string utf8_to_u32(std::string_view text);
std::string u32_to_utf8(std::u32string_view text);

std::string_view trim(std::string_view text);

/// Canonical key for name comparison: ASCII/Latin casefold, diacritics stripped,
/// typographic apostrophes unified, whitespace collapsed and trimmed.
std::string fold_name(std::string_view text);

}  // namespace georef
