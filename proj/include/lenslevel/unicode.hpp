#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace lenslevel::unicode {

// Malformed UTF-8 sequences decode to U+FFFD, one per offending byte run.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);
void append_utf8(std::string& out, char32_t cp);

std::size_t codepoint_count(std::string_view utf8);

// Full Unicode lowercase mapping (root locale), so one codepoint may map to several.
std::u32string to_lower(std::u32string_view text);
std::string to_lower(std::string_view utf8);

// Letters (L*) and decimal digits (Nd).
bool is_alnum(char32_t cp);
bool is_space(char32_t cp);

}  // namespace lenslevel::unicode
