#ifndef CORDTAG_TEXT_HPP
#define CORDTAG_TEXT_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

// UTF-8 helpers. All character offsets in this project count Unicode scalar
// values, never bytes.

namespace cordtag {

class Utf8Error : public std::runtime_error {
 public:
  explicit Utf8Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Decodes UTF-8 into a sequence of scalar values. Throws Utf8Error on
// malformed input (truncated sequences, overlong encodings, surrogates).
std::u32string utf8_decode(std::string_view text);

std::string utf8_encode(std::u32string_view text);

// Number of scalar values in a UTF-8 string.
std::size_t utf8_length(std::string_view text);

// Substring by scalar offsets, end exclusive. Offsets past the end clamp.
std::string utf8_slice(std::string_view text, std::size_t start,
                       std::size_t end);

// Word constituents for token-boundary checks: ASCII alphanumerics, plus all
// non-ASCII scalars (so matches never start or end inside a multibyte word).
inline bool is_word_char(char32_t c) {
  if (c < 0x80) {
    return (c >= U'0' && c <= U'9') || (c >= U'A' && c <= U'Z') ||
           (c >= U'a' && c <= U'z');
  }
  return true;
}

// ASCII-only case folding; non-ASCII scalars are kept as-is.
inline char32_t fold_char(char32_t c) {
  return (c >= U'A' && c <= U'Z') ? c + 32 : c;
}

std::u32string fold(std::u32string_view text);

// Replaces \r\n and bare \r with \n.
std::string normalize_newlines(std::string_view text);

}  // namespace cordtag

#endif  // CORDTAG_TEXT_HPP
