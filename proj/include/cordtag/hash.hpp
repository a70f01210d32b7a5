#ifndef CORDTAG_HASH_HPP
#define CORDTAG_HASH_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace cordtag {

// FNV-1a, used for config fingerprints. Not cryptographic.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

inline std::string fnv1a_hex(std::string_view data) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a(data);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace cordtag

#endif  // CORDTAG_HASH_HPP
