#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "graphbus/channel.hpp"

namespace graphbus {

/// Endpoint address. scheme "tcp" carries host:port (host "*" = any
/// interface, bind side only); scheme "ipc" carries a local socket path.
struct Uri {
  std::string scheme;
  std::string host;        // tcp only
  std::uint16_t port = 0;  // tcp only; 0 = ephemeral (bind side only)
  std::string path;        // ipc only
  std::string text;        // original form

  bool is_tcp() const noexcept { return scheme == "tcp"; }
  bool is_ipc() const noexcept { return scheme == "ipc"; }
};

/// Throws Error(invalid_uri) on anything that is not tcp://host:port or
/// ipc://path. Placeholder strings (the config template's "x") get a
/// dedicated diagnostic instead of a guess.
Uri parse_uri(const std::string& text);

/// Declarative routing table for the bridge.
///
/// File schema (network_setting.yaml):
///   network:
///     publisher:
///       ip: "tcp://*:5553"
///       channels: [pre_channel]
///     subscribers:
///       - ip: "tcp://192.168.0.7:5553"
///         channels: [next_channel]
struct NetworkConfig {
  struct Endpoint {
    Uri uri;
    std::vector<ChannelId> channels;
  };

  std::optional<Endpoint> publisher;
  std::vector<Endpoint> subscribers;

  bool enabled() const noexcept {
    return publisher.has_value() || !subscribers.empty();
  }

  bool exports_channel(std::string_view name) const noexcept {
    if (!publisher) return false;
    for (const auto& c : publisher->channels) {
      if (c.name() == name) return true;
    }
    return false;
  }
};

/// Parses the file. A file without a `network` section yields an empty
/// (disabled) config. Throws Error(config_parse) / Error(invalid_uri) with
/// file and field diagnostics.
NetworkConfig load_network_config(const std::filesystem::path& path);

/// Same parser over in-memory text.
NetworkConfig parse_network_config(const std::string& text,
                                   const std::string& origin = "<string>");

}  // namespace graphbus
