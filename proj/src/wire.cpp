#include "graphbus/wire.hpp"

#include <cstring>

namespace graphbus::wire {

void put_u16le(std::byte* out, std::uint16_t v) noexcept {
  out[0] = static_cast<std::byte>(v & 0xFF);
  out[1] = static_cast<std::byte>((v >> 8) & 0xFF);
}

void put_u32le(std::byte* out, std::uint32_t v) noexcept {
  for (int i = 0; i < 4; ++i)
    out[i] = static_cast<std::byte>((v >> (8 * i)) & 0xFF);
}

void put_u64le(std::byte* out, std::uint64_t v) noexcept {
  for (int i = 0; i < 8; ++i)
    out[i] = static_cast<std::byte>((v >> (8 * i)) & 0xFF);
}

std::uint16_t get_u16le(const std::byte* in) noexcept {
  return static_cast<std::uint16_t>(std::to_integer<std::uint16_t>(in[0]) |
                                    (std::to_integer<std::uint16_t>(in[1])
                                     << 8));
}

std::uint32_t get_u32le(const std::byte* in) noexcept {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | std::to_integer<std::uint32_t>(in[i]);
  return v;
}

std::uint64_t get_u64le(const std::byte* in) noexcept {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | std::to_integer<std::uint64_t>(in[i]);
  return v;
}

const char* discard_reason_name(DiscardReason reason) noexcept {
  switch (reason) {
    case DiscardReason::truncated_header: return "truncated_header";
    case DiscardReason::bad_separator: return "bad_separator";
    case DiscardReason::bad_utf8: return "bad_utf8";
    case DiscardReason::bad_channel: return "bad_channel";
  }
  return "?";
}

void pack_into(std::vector<std::byte>& out, const ChannelId& channel,
               std::span<const std::byte> data_string) {
  if (data_string.size() > kMaxPayloadBytes) {
    raise(Errc::payload_too_large,
          "payload of " + std::to_string(data_string.size()) +
              " bytes exceeds the 64 MiB frame limit");
  }
  const std::string& name = channel.name();
  const std::size_t base = out.size();
  out.resize(base + frame_size(name.size(), data_string.size()));
  std::byte* p = out.data() + base;
  put_u32le(p, static_cast<std::uint32_t>(name.size()));
  put_u16le(p + 4, kHeaderSeparator);
  std::memcpy(p + kFixedHeaderBytes, name.data(), name.size());
  if (!data_string.empty()) {
    std::memcpy(p + kFixedHeaderBytes + name.size(), data_string.data(),
                data_string.size());
  }
}

std::vector<std::byte> pack(const ChannelId& channel,
                            std::span<const std::byte> data_string) {
  std::vector<std::byte> out;
  pack_into(out, channel, data_string);
  return out;
}

std::variant<Unpacked, DiscardReason> unpack(
    std::span<const std::byte> frame) noexcept {
  if (frame.size() < kFixedHeaderBytes) {
    return DiscardReason::truncated_header;
  }
  if (get_u16le(frame.data() + 4) != kHeaderSeparator) {
    return DiscardReason::bad_separator;
  }
  const std::uint32_t header_length = get_u32le(frame.data());
  if (header_length > frame.size() - kFixedHeaderBytes) {
    return DiscardReason::truncated_header;  // head_str runs past frame end
  }
  std::string_view name(
      reinterpret_cast<const char*>(frame.data()) + kFixedHeaderBytes,
      header_length);
  if (!utf8_valid(name)) {
    return DiscardReason::bad_utf8;
  }
  if (ChannelId::validate(name) != Errc::ok) {
    return DiscardReason::bad_channel;
  }
  // data_string runs to the end of the frame, so truncation there is
  // impossible by construction.
  return Unpacked{name, frame.subspan(kFixedHeaderBytes + header_length)};
}

}  // namespace graphbus::wire
