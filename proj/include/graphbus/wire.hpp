#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "graphbus/channel.hpp"

namespace graphbus::wire {

/// Fixed separator in every valid frame, ASCII "HR" as a little-endian u16.
inline constexpr std::uint16_t kHeaderSeparator = 0x4852;

/// Bytes occupied by header_length (u32) + header_separator (u16).
inline constexpr std::size_t kFixedHeaderBytes = 6;

/// Guard against runaway frames; enforced at pack time and by stream readers.
inline constexpr std::size_t kMaxPayloadBytes = 64ull << 20;

/// Largest possible frame: fixed header + longest channel + largest payload.
inline constexpr std::size_t kMaxFrameBytes =
    kFixedHeaderBytes + ChannelId::kMaxEncodedBytes + kMaxPayloadBytes;

/// Why an inbound frame was dropped. Receivers count these and move on;
/// a bad frame never terminates the process.
enum class DiscardReason {
  truncated_header,  // fewer than 6 bytes, or head_str runs past frame end
  bad_separator,     // separator field != 0x4852
  bad_utf8,          // head_str is not valid UTF-8
  bad_channel,       // head_str violates channel-name rules
};

const char* discard_reason_name(DiscardReason reason) noexcept;

/// Builds one frame. Layout, all integers little-endian:
///
///   [header_length: u32] [header_separator: u16 = 0x4852]
///   [head_str: header_length bytes, UTF-8 channel name] [data_string]
///
/// header_length equals the byte length of head_str; data_string runs to the
/// end of the frame (its length is carried by the transport, not the frame).
/// Throws Error(payload_too_large) beyond kMaxPayloadBytes.
std::vector<std::byte> pack(const ChannelId& channel,
                            std::span<const std::byte> data_string);

/// pack() appending to an existing buffer (avoids an allocation on hot paths).
void pack_into(std::vector<std::byte>& out, const ChannelId& channel,
               std::span<const std::byte> data_string);

/// Successful unpack: views into the input frame, valid while it lives.
struct Unpacked {
  std::string_view channel;            // validated channel name
  std::span<const std::byte> payload;  // data_string
};

/// Parses an arbitrary byte string. Never throws; structural violations come
/// back as a DiscardReason for the caller to count and drop.
std::variant<Unpacked, DiscardReason> unpack(
    std::span<const std::byte> frame) noexcept;

/// Frame size arithmetic: 6 + encoded channel length + payload length.
constexpr std::size_t frame_size(std::size_t channel_bytes,
                                 std::size_t payload_bytes) {
  return kFixedHeaderBytes + channel_bytes + payload_bytes;
}

// Little-endian integer helpers shared by the framing and stream code.
void put_u16le(std::byte* out, std::uint16_t v) noexcept;
void put_u32le(std::byte* out, std::uint32_t v) noexcept;
void put_u64le(std::byte* out, std::uint64_t v) noexcept;
std::uint16_t get_u16le(const std::byte* in) noexcept;
std::uint32_t get_u32le(const std::byte* in) noexcept;
std::uint64_t get_u64le(const std::byte* in) noexcept;

}  // namespace graphbus::wire
