#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "graphbus/channel.hpp"
#include "graphbus/net_config.hpp"

namespace graphbus {

/// Monotonic transport counters plus two connection gauges.
struct BridgeStats {
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_received = 0;
  std::uint64_t frames_discarded = 0;  // unpack or decode failures
  std::uint64_t frames_unrouted = 0;   // valid frames with no local binding
  std::uint64_t bytes_sent = 0;        // wire bytes, including stream prefixes
  std::uint64_t bytes_received = 0;
  std::uint64_t frames_dropped_backpressure = 0;  // slow-peer queue overflow

  std::uint64_t publisher_peers = 0;   // connected inbound peers (gauge)
  std::uint64_t subscriber_links = 0;  // connected outbound links (gauge)
};

/// Config-driven transport endpoint pair for one process.
///
/// The publisher side binds one endpoint and serves any number of peers;
/// each configured subscriber endpoint is dialed (and redialed with
/// exponential backoff, 100 ms doubling to a 5 s cap) in the background.
///
/// Streams carry frames with an outer u32 LE length prefix covering the
/// whole frame. A connecting subscriber first sends one frame on channel
/// "__subscribe" whose payload is its instance id in hex followed by one
/// channel name per line; the publisher then forwards exactly the frames
/// those channels select (and none at all to peers carrying its own
/// instance id, which suppresses self-loops).
class Bridge {
 public:
  enum class SinkResult { delivered, unrouted, decode_failed };

  /// Receives every structurally valid inbound frame on the reader thread.
  using InboundSink =
      std::function<SinkResult(std::string_view channel,
                               std::span<const std::byte> data_string)>;

  /// Binds and dials per `config`. Throws Error(bind_failure) when the
  /// publisher endpoint cannot be bound; unreachable subscriber targets are
  /// not an error (they retry in the background).
  Bridge(const NetworkConfig& config, InboundSink sink,
         std::uint64_t instance_id);
  ~Bridge();

  Bridge(const Bridge&) = delete;
  Bridge& operator=(const Bridge&) = delete;

  /// Packs and enqueues the frame to every connected peer subscribed to the
  /// channel. Fire-and-forget: never blocks on the network, and with no
  /// matching peer the frame is simply dropped.
  void publish_outbound(const ChannelId& channel,
                        std::span<const std::byte> data_string);

  bool exports(std::string_view channel) const noexcept {
    return config_.exports_channel(channel);
  }

  BridgeStats stats() const;

  /// Publisher endpoint with the real port filled in (useful when the
  /// config asked for an ephemeral one). Empty without a publisher section.
  std::string bound_endpoint() const;
  std::uint16_t bound_port() const;

  std::uint64_t instance_id() const noexcept { return instance_id_; }

  void stop();

  /// Name of the subscription-handshake channel.
  static constexpr const char* kSubscribeChannel = "__subscribe";

 private:
  struct Impl;
  NetworkConfig config_;
  std::uint64_t instance_id_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace graphbus
