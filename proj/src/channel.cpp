#include "graphbus/channel.hpp"

#include <cstdint>

namespace graphbus {
namespace {

bool is_ascii_whitespace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' ||
         c == '\r';
}

}  // namespace

bool utf8_valid(std::string_view s) noexcept {
  const auto* p = reinterpret_cast<const unsigned char*>(s.data());
  std::size_t n = s.size();
  std::size_t i = 0;
  while (i < n) {
    unsigned char b0 = p[i];
    if (b0 < 0x80) {
      ++i;
      continue;
    }
    std::size_t len;
    std::uint32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1Fu;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0Fu;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07u;
    } else {
      return false;  // stray continuation or invalid lead byte
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      unsigned char b = p[i + k];
      if ((b & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (b & 0x3Fu);
    }
    // Overlong encodings, UTF-16 surrogates and out-of-range code points.
    if (len == 2 && cp < 0x80) return false;
    if (len == 3 && cp < 0x800) return false;
    if (len == 4 && cp < 0x10000) return false;
    if (cp >= 0xD800 && cp <= 0xDFFF) return false;
    if (cp > 0x10FFFF) return false;
    i += len;
  }
  return true;
}

Errc ChannelId::validate(std::string_view name) noexcept {
  if (name.empty()) return Errc::invalid_channel;
  if (name.size() > kMaxEncodedBytes) return Errc::channel_too_long;
  for (unsigned char c : name) {
    if (c == '\0' || is_ascii_whitespace(c)) return Errc::invalid_channel;
  }
  if (!utf8_valid(name)) return Errc::invalid_channel;
  return Errc::ok;
}

ChannelId::ChannelId(std::string_view name) : name_(name) {
  Errc rc = validate(name);
  if (rc == Errc::channel_too_long) {
    raise(rc, "channel name exceeds 255 bytes (" +
                  std::to_string(name.size()) + " bytes)");
  }
  if (rc != Errc::ok) {
    raise(rc, "invalid channel name: must be non-empty UTF-8 without "
              "whitespace or NUL");
  }
}

}  // namespace graphbus
