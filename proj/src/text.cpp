#include "georef/text.hpp"

#include <array>

namespace georef {
namespace {

// Base letters for U+00C0..U+017F. '*' marks a multi-letter expansion handled in
// expand_special, '?' marks code points left untouched.
constexpr std::string_view kLatinFold =
    // C0..DF
    "aaaaaa*ceeeeiiiidnooooo?ouuuuy**"
    // E0..FF
    "aaaaaa*ceeeeiiiidnooooo?ouuuuy*y"
    // 100..11F
    "aaaaaaccccccccddddeeeeeeeeeegggg"
    // 120..13F
    "gggghhhhiiiiiiiiii**jjkkklllllll"
    // 140..15F
    "lllnnnnnnnnnoooooo**rrrrrrssssss"
    // 160..17F
    "ssttttttuuuuuuuuuuuuwwyyyzzzzzzs";

std::string_view expand_special(char32_t c) {
  switch (c) {
    case 0xC6: case 0xE6: return "ae";
    case 0xDE: case 0xFE: return "th";
    case 0xDF: return "ss";
    case 0x132: case 0x133: return "ij";
    case 0x152: case 0x153: return "oe";
    default: return {};
  }
}

void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
         c == 0xA0 || c == 0x2007 || c == 0x202F;
}

}  // namespace

std::u32string utf8_to_u32(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    int extra = 0;
    char32_t c = 0;
    if (b0 < 0x80) {
      c = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      c = b0 & 0x1F;
      extra = 1;
    } else if ((b0 & 0xF0) == 0xE0) {
      c = b0 & 0x0F;
      extra = 2;
    } else if ((b0 & 0xF8) == 0xF0) {
      c = b0 & 0x07;
      extra = 3;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      if (i + k >= text.size()) {
        ok = false;
        break;
      }
      const auto bk = static_cast<unsigned char>(text[i + k]);
      if ((bk & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      c = (c << 6) | (bk & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(c);
    i += extra + 1;
  }
  return out;
}

std::string u32_to_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) append_utf8(out, c);
  return out;
}

std::string_view trim(std::string_view text) {
  constexpr std::string_view ws = " \t\n\r\f\v";
  const auto first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(ws);
  return text.substr(first, last - first + 1);
}

std::string fold_name(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char32_t c : utf8_to_u32(text)) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    if (c >= U'A' && c <= U'Z') {
      out.push_back(static_cast<char>(c - U'A' + U'a'));
    } else if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c == 0x2018 || c == 0x2019 || c == 0x02BC || c == 0x00B4 || c == 0x0060) {
      out.push_back('\'');
    } else if (c >= 0xC0 && c <= 0x17F) {
      const char base = kLatinFold[c - 0xC0];
      if (base == '*') {
        out.append(expand_special(c));
      } else if (base == '?') {
        append_utf8(out, c);
      } else {
        out.push_back(base);
      }
    } else if (c >= 0x300 && c <= 0x36F) {
      // combining diacritical marks
    } else {
      append_utf8(out, c);
    }
  }
  return out;
}

}  // namespace georef
