#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

#include "graphbus/errors.hpp"

namespace graphbus {

/// A channel name: non-empty UTF-8, at most 255 encoded bytes, no whitespace
/// and no embedded NUL. Equality is byte equality of the encoded name.
class ChannelId {
 public:
  static constexpr std::size_t kMaxEncodedBytes = 255;

  /// Throws Error(invalid_channel) or Error(channel_too_long).
  explicit ChannelId(std::string_view name);

  /// Errc::ok when `name` satisfies every channel invariant.
  static Errc validate(std::string_view name) noexcept;

  const std::string& name() const noexcept { return name_; }

  friend bool operator==(const ChannelId&, const ChannelId&) = default;
  friend auto operator<=>(const ChannelId&, const ChannelId&) = default;

 private:
  std::string name_;
};

/// Strict UTF-8 validity (rejects overlong forms, surrogates, > U+10FFFF).
bool utf8_valid(std::string_view s) noexcept;

}  // namespace graphbus

template <>
struct std::hash<graphbus::ChannelId> {
  std::size_t operator()(const graphbus::ChannelId& c) const noexcept {
    return std::hash<std::string>{}(c.name());
  }
};
