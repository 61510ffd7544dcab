#include "lenslevel/unicode.hpp"

#include <unicode/uchar.h>
#include <unicode/ustring.h>
#include <unicode/utf16.h>
#include <unicode/utf8.h>

#include <vector>

#include "lenslevel/common.hpp"

namespace lenslevel::unicode {

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    out.push_back(c < 0 ? U'\uFFFD' : static_cast<char32_t>(c));
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t len = 0;
  UBool error = false;
  U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (error) {
    append_utf8(out, U'\uFFFD');
    return;
  }
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
}

std::string encode_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) append_utf8(out, cp);
  return out;
}

std::size_t codepoint_count(std::string_view utf8) { return decode_utf8(utf8).size(); }

std::u32string to_lower(std::u32string_view text) {
  if (text.empty()) return {};
  std::vector<UChar> utf16;
  utf16.reserve(text.size() * 2);
  for (char32_t cp : text) {
    UChar32 c = static_cast<UChar32>(cp);
    if (c > 0x10FFFF || U_IS_SURROGATE(c)) c = 0xFFFD;
    if (U_IS_BMP(c)) {
      utf16.push_back(static_cast<UChar>(c));
    } else {
      utf16.push_back(U16_LEAD(c));
      utf16.push_back(U16_TRAIL(c));
    }
  }

  std::vector<UChar> lowered(utf16.size() * 3 + 8);
  UErrorCode status = U_ZERO_ERROR;
  int32_t len = u_strToLower(lowered.data(), static_cast<int32_t>(lowered.size()), utf16.data(),
                             static_cast<int32_t>(utf16.size()), "", &status);
  if (status == U_BUFFER_OVERFLOW_ERROR) {
    lowered.resize(static_cast<std::size_t>(len));
    status = U_ZERO_ERROR;
    len = u_strToLower(lowered.data(), len, utf16.data(), static_cast<int32_t>(utf16.size()), "", &status);
  }
  if (U_FAILURE(status)) throw Error(std::string("unicode lowercase failed: ") + u_errorName(status));

  std::u32string out;
  out.reserve(static_cast<std::size_t>(len));
  int32_t i = 0;
  while (i < len) {
    UChar32 c;
    U16_NEXT(lowered.data(), i, len, c);
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::string to_lower(std::string_view utf8) { return encode_utf8(to_lower(decode_utf8(utf8))); }

bool is_alnum(char32_t cp) { return u_isalnum(static_cast<UChar32>(cp)); }

bool is_space(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)); }

}  // namespace lenslevel::unicode
