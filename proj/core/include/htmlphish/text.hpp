#pragma once

#include <string>
#include <string_view>

namespace htmlphish::text {

inline constexpr char32_t kReplacementChar = U'\uFFFD';

// Decodes UTF-8. Every maximal ill-formed subsequence becomes one U+FFFD,
// matching the W3C/WHATWG decoder behaviour.
std::u32string decode_utf8(std::string_view bytes);

// Re-encodes a sequence of Unicode scalar values. Surrogates and values
// above U+10FFFF are written as U+FFFD.
std::string encode_utf8(std::u32string_view scalars);
std::string encode_utf8(char32_t scalar);

// Convenience: decode then re-encode, yielding valid UTF-8.
std::string sanitize_utf8(std::string_view bytes);

bool is_whitespace(char32_t c);
// Alphanumeric or underscore; everything else counts as punctuation for
// word tokenization.
bool is_word_char(char32_t c);

}  // namespace htmlphish::text
