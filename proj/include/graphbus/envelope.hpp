#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <typeindex>
#include <utility>

#include "graphbus/channel.hpp"

namespace graphbus {

/// Type-erased immutable payload. `type` always reflects the dynamic type of
/// `value`; `type_tag` names the codec the value is paired with, and stays
/// empty for values that never cross a serialization boundary.
struct Message {
  std::shared_ptr<const void> value;
  std::type_index type{typeid(void)};
  std::string type_tag;

  template <class T>
  static Message of(std::shared_ptr<const T> v, std::string tag = {}) {
    return Message{std::static_pointer_cast<const void>(std::move(v)),
                   typeid(T), std::move(tag)};
  }

  /// nullptr when the stored value is not a T.
  template <class T>
  std::shared_ptr<const T> as() const {
    if (type != std::type_index(typeid(T))) return nullptr;
    return std::static_pointer_cast<const T>(value);
  }
};

/// One published message as delivered to subscribers. The payload is shared
/// by reference: every subscriber on the channel observes the identical
/// value, and nothing may mutate it after publication.
struct Envelope {
  ChannelId channel;
  Message message;
  std::uint64_t sequence = 0;  // strictly increasing per channel
};

}  // namespace graphbus
