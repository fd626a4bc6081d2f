#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <typeindex>
#include <unordered_map>

#include "graphbus/buffer.hpp"
#include "graphbus/envelope.hpp"
#include "graphbus/errors.hpp"

namespace graphbus {

/// Turns one payload type into wire bytes and back. deserialize must invert
/// serialize exactly: deserialize(serialize(x)) == x for every x of the
/// registered type. deserialize throws Error on malformed input.
struct Codec {
  std::function<Bytes(const Message&)> serialize;
  std::function<Message(std::span<const std::byte>)> deserialize;
};

/// Write-once-read-many codec table keyed by type tag. Registrations happen
/// during startup, before messages flow; lookups afterwards take the shared
/// path only.
class CodecRegistry {
 public:
  struct Entry {
    std::type_index type{typeid(void)};
    Codec codec;
    std::string identity;  // distinguishes codecs for the duplicate check
  };

  /// Registering the same (tag, identity) again is an idempotent no-op;
  /// a different codec under an existing tag throws Error(duplicate_codec).
  void register_codec(const std::string& type_tag, std::type_index type,
                      Codec codec, std::string identity);

  std::shared_ptr<const Entry> find(const std::string& type_tag) const;

  /// The tag a C++ type was registered under, for tag-less publish calls.
  std::optional<std::string> tag_for(std::type_index type) const;

  template <class T>
  void register_typed(const std::string& type_tag,
                      std::function<Bytes(const T&)> ser,
                      std::function<T(std::span<const std::byte>)> de,
                      std::string identity = {}) {
    if (identity.empty()) identity = std::string("cpp:") + typeid(T).name();
    Codec c;
    c.serialize = [ser = std::move(ser)](const Message& m) -> Bytes {
      auto p = m.as<T>();
      if (!p) {
        raise(Errc::type_mismatch,
              "payload type does not match the codec registered for tag");
      }
      return ser(*p);
    };
    c.deserialize = [de = std::move(de),
                     type_tag](std::span<const std::byte> d) -> Message {
      return Message::of(std::make_shared<const T>(de(d)), type_tag);
    };
    register_codec(type_tag, typeid(T), std::move(c), std::move(identity));
  }

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, std::shared_ptr<const Entry>> by_tag_;
  std::unordered_map<std::type_index, std::string> tag_by_type_;
};

namespace codecs {

/// Tag every runtime pre-registers for raw byte payloads.
inline constexpr const char* kBytesTag = "bytes";

/// Identity codec for ByteBuffer payloads: data_string is the payload bytes.
Codec byte_buffer_identity();

/// Reference codec for byte-string payloads: u32 LE length + raw bytes.
/// Deliberately copies on both sides; the benchmark uses it as the
/// serialize-copy baseline.
Codec length_delimited_bytes(std::string tag);

/// Reference codec for integers: u64 little-endian.
Codec u64_le(std::string tag);

}  // namespace codecs

}  // namespace graphbus
