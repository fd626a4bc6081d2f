#include "graphbus/codec.hpp"

#include <cstring>
#include <mutex>

#include "graphbus/wire.hpp"

namespace graphbus {

void CodecRegistry::register_codec(const std::string& type_tag,
                                   std::type_index type, Codec codec,
                                   std::string identity) {
  if (type_tag.empty()) {
    raise(Errc::invalid_argument, "codec type_tag must be non-empty");
  }
  std::unique_lock lock(mu_);
  auto it = by_tag_.find(type_tag);
  if (it != by_tag_.end()) {
    if (it->second->type == type && it->second->identity == identity) {
      return;  // idempotent re-registration
    }
    raise(Errc::duplicate_codec,
          "a different codec is already registered for tag '" + type_tag +
              "'");
  }
  auto entry = std::make_shared<Entry>();
  entry->type = type;
  entry->codec = std::move(codec);
  entry->identity = std::move(identity);
  by_tag_.emplace(type_tag, std::move(entry));
  tag_by_type_.emplace(type, type_tag);
}

std::shared_ptr<const CodecRegistry::Entry> CodecRegistry::find(
    const std::string& type_tag) const {
  std::shared_lock lock(mu_);
  auto it = by_tag_.find(type_tag);
  if (it == by_tag_.end()) return nullptr;
  return it->second;
}

std::optional<std::string> CodecRegistry::tag_for(std::type_index type) const {
  std::shared_lock lock(mu_);
  auto it = tag_by_type_.find(type);
  if (it == tag_by_type_.end()) return std::nullopt;
  return it->second;
}

namespace codecs {

Codec byte_buffer_identity() {
  Codec c;
  c.serialize = [](const Message& m) -> Bytes {
    auto p = m.as<ByteBuffer>();
    if (!p) {
      raise(Errc::type_mismatch,
            "'bytes' codec expects a ByteBuffer payload");
    }
    return p->bytes();
  };
  c.deserialize = [](std::span<const std::byte> d) -> Message {
    return Message::of(ByteBuffer::make_shared(d), kBytesTag);
  };
  return c;
}

Codec length_delimited_bytes(std::string tag) {
  Codec c;
  c.serialize = [](const Message& m) -> Bytes {
    auto p = m.as<Bytes>();
    if (!p) {
      raise(Errc::type_mismatch,
            "length-delimited codec expects a Bytes payload");
    }
    Bytes out(4 + p->size());
    wire::put_u32le(out.data(), static_cast<std::uint32_t>(p->size()));
    if (!p->empty()) std::memcpy(out.data() + 4, p->data(), p->size());
    return out;
  };
  c.deserialize = [tag](std::span<const std::byte> d) -> Message {
    if (d.size() < 4) {
      raise(Errc::io_error, "length-delimited payload shorter than 4 bytes");
    }
    std::uint32_t n = wire::get_u32le(d.data());
    if (d.size() - 4 != n) {
      raise(Errc::io_error, "length-delimited payload length mismatch");
    }
    return Message::of(
        std::make_shared<const Bytes>(d.begin() + 4, d.end()), tag);
  };
  return c;
}

Codec u64_le(std::string tag) {
  Codec c;
  c.serialize = [](const Message& m) -> Bytes {
    auto p = m.as<std::uint64_t>();
    if (!p) raise(Errc::type_mismatch, "u64 codec expects a uint64_t payload");
    Bytes out(8);
    wire::put_u64le(out.data(), *p);
    return out;
  };
  c.deserialize = [tag](std::span<const std::byte> d) -> Message {
    if (d.size() != 8) {
      raise(Errc::io_error, "u64 payload must be exactly 8 bytes");
    }
    return Message::of(std::make_shared<const std::uint64_t>(
                           wire::get_u64le(d.data())),
                       tag);
  };
  return c;
}

}  // namespace codecs

}  // namespace graphbus
