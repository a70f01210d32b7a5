#include "cordtag/text.hpp"

namespace cordtag {

namespace {

// Decodes one scalar starting at text[pos]; advances pos. Throws on error.
char32_t decode_one(std::string_view text, std::size_t& pos) {
  const auto byte = [&](std::size_t i) -> unsigned char {
    return static_cast<unsigned char>(text[i]);
  };
  unsigned char b0 = byte(pos);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  int len;
  char32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    throw Utf8Error("invalid UTF-8 lead byte at offset " +
                    std::to_string(pos));
  }
  if (pos + len > text.size()) {
    throw Utf8Error("truncated UTF-8 sequence at offset " +
                    std::to_string(pos));
  }
  for (int i = 1; i < len; ++i) {
    unsigned char b = byte(pos + i);
    if ((b & 0xC0) != 0x80) {
      throw Utf8Error("invalid UTF-8 continuation byte at offset " +
                      std::to_string(pos + i));
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr char32_t kMinByLen[5] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMinByLen[len] || cp > 0x10FFFF ||
      (cp >= 0xD800 && cp <= 0xDFFF)) {
    throw Utf8Error("invalid UTF-8 scalar at offset " + std::to_string(pos));
  }
  pos += len;
  return cp;
}

void encode_one(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace

std::u32string utf8_decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    out.push_back(decode_one(text, pos));
  }
  return out;
}

std::string utf8_encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) {
    encode_one(cp, out);
  }
  return out;
}

std::size_t utf8_length(std::string_view text) {
  std::size_t n = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    decode_one(text, pos);
    ++n;
  }
  return n;
}

std::string utf8_slice(std::string_view text, std::size_t start,
                       std::size_t end) {
  std::string out;
  std::size_t pos = 0;
  std::size_t idx = 0;
  while (pos < text.size() && idx < end) {
    std::size_t begin = pos;
    decode_one(text, pos);
    if (idx >= start) {
      out.append(text.substr(begin, pos - begin));
    }
    ++idx;
  }
  return out;
}

std::u32string fold(std::u32string_view text) {
  std::u32string out(text);
  for (char32_t& c : out) {
    c = fold_char(c);
  }
  return out;
}

std::string normalize_newlines(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') {
        continue;
      }
      out.push_back('\n');
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

}  // namespace cordtag
